use std::collections::HashMap;

use super::{EdgeId, FaceId, HalfEdge, Offset, Surface, VertexId};
use crate::MeshError;

pub(crate) struct Built {
    pub half_edges: Vec<HalfEdge>,
    pub face_edges: Vec<Vec<EdgeId>>,
}

/// Links face cycles into half-edges. Interior twins are matched by
/// endpoints (and, on the torus, by negated offset), the `j`-th occurrence
/// of `u -> v` pairing with the `j`-th occurrence of `v -> u`. Unmatched
/// planar edges receive an outer twin whose successor is found by rotating
/// counterclockwise around the shared vertex through bounded faces.
pub(crate) fn build_half_edges(
    surface: Surface,
    num_vertices: usize,
    faces: &[Vec<VertexId>],
    offsets: &[Offset],
) -> Result<Built, MeshError> {
    let mut half_edges = Vec::new();
    let mut face_edges = Vec::with_capacity(faces.len());
    for (f, poly) in faces.iter().enumerate() {
        for (i, &v) in poly.iter().enumerate() {
            if v >= num_vertices {
                return Err(MeshError::DanglingVertex {
                    face: f,
                    corner: i,
                    vertex: v,
                    count: num_vertices,
                });
            }
        }
        let base = half_edges.len();
        let n = poly.len();
        for (i, &v) in poly.iter().enumerate() {
            half_edges.push(HalfEdge {
                origin: v,
                twin: usize::MAX,
                next: base + (i + 1) % n,
                face: Some(f as FaceId),
            });
        }
        face_edges.push((base..base + n).collect());
    }
    let interior = half_edges.len();
    let offset_of = |h: EdgeId| -> Offset {
        if surface == Surface::Torus {
            offsets.get(h).copied().unwrap_or([0, 0])
        } else {
            [0, 0]
        }
    };
    let target = |hes: &[HalfEdge], h: EdgeId| hes[hes[h].next].origin;

    // Group directed edges by (from, to, offset).
    let mut groups: HashMap<(VertexId, VertexId, Offset), Vec<EdgeId>> = HashMap::new();
    for h in 0..interior {
        let key = (half_edges[h].origin, target(&half_edges, h), offset_of(h));
        if surface == Surface::Planar && key.0 == key.1 {
            return Err(MeshError::Structure(format!(
                "edge {} > {} is a loop, not allowed in planar meshes",
                key.0, key.1
            )));
        }
        groups.entry(key).or_default().push(h);
    }
    let mut keys: Vec<_> = groups.keys().copied().collect();
    keys.sort();
    let mut unmatched = Vec::new();
    for key in keys {
        let (u, v, o) = key;
        let mine = &groups[&key];
        if surface == Surface::Planar && mine.len() > 1 {
            return Err(MeshError::Structure(format!(
                "directed edge {u} > {v} is used by {} faces; faces must be consistently oriented and simple",
                mine.len()
            )));
        }
        let twin_key = (v, u, [-o[0], -o[1]]);
        if twin_key == key {
            if mine.len() % 2 == 1 {
                unmatched.extend(mine.last().copied());
            }
            for pair in mine.chunks_exact(2) {
                half_edges[pair[0]].twin = pair[1];
                half_edges[pair[1]].twin = pair[0];
            }
            continue;
        }
        if key > twin_key && groups.contains_key(&twin_key) {
            continue;
        }
        let theirs = groups.get(&twin_key).map(Vec::as_slice).unwrap_or(&[]);
        for (j, &h) in mine.iter().enumerate() {
            match theirs.get(j) {
                Some(&g) => {
                    half_edges[h].twin = g;
                    half_edges[g].twin = h;
                }
                None => unmatched.push(h),
            }
        }
        unmatched.extend(theirs.iter().skip(mine.len()).copied());
    }
    unmatched.sort_unstable();

    if surface == Surface::Torus {
        if let Some(&h) = unmatched.first() {
            let (u, v) = (half_edges[h].origin, target(&half_edges, h));
            let o = offset_of(h);
            return Err(MeshError::OffsetAntisymmetry(format!(
                "directed edge {u} > {v} with offset [{}, {}] has no reverse edge with offset [{}, {}]",
                o[0], o[1], -o[0], -o[1]
            )));
        }
        return Ok(Built {
            half_edges,
            face_edges,
        });
    }

    for &h in &unmatched {
        let id = half_edges.len();
        let origin = target(&half_edges, h);
        half_edges.push(HalfEdge {
            origin,
            twin: h,
            next: usize::MAX,
            face: None,
        });
        half_edges[h].twin = id;
    }
    let mut prev = vec![usize::MAX; interior];
    for h in 0..interior {
        prev[half_edges[h].next] = h;
    }
    for o in interior..half_edges.len() {
        let start = half_edges[o].twin;
        let mut g = start;
        let mut steps = 0;
        let next = loop {
            g = half_edges[prev[g]].twin;
            if half_edges[g].face.is_none() {
                break g;
            }
            steps += 1;
            if g == start || steps > interior {
                return Err(MeshError::Structure(format!(
                    "vertex {} is not a manifold boundary vertex",
                    half_edges[start].origin
                )));
            }
        };
        half_edges[o].next = next;
    }
    Ok(Built {
        half_edges,
        face_edges,
    })
}

/// A planar combinatorial map with faces of any degree; the input of the
/// diamond construction.
#[derive(Clone, Debug)]
pub struct PlanarMap {
    num_vertices: usize,
    half_edges: Vec<HalfEdge>,
    prev: Vec<EdgeId>,
    faces: Vec<Vec<EdgeId>>,
}

impl PlanarMap {
    pub fn from_faces(num_vertices: usize, faces: &[Vec<VertexId>]) -> Result<Self, MeshError> {
        for (f, poly) in faces.iter().enumerate() {
            if poly.len() < 3 {
                return Err(MeshError::Structure(format!(
                    "faces[{f}]: degree {} is below 3",
                    poly.len()
                )));
            }
        }
        let built = build_half_edges(Surface::Planar, num_vertices, faces, &[])?;
        let mut prev = vec![usize::MAX; built.half_edges.len()];
        for (h, he) in built.half_edges.iter().enumerate() {
            prev[he.next] = h;
        }
        Ok(PlanarMap {
            num_vertices,
            half_edges: built.half_edges,
            prev,
            faces: built.face_edges,
        })
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn num_faces(&self) -> usize {
        self.faces.len()
    }

    pub fn num_edges(&self) -> usize {
        self.half_edges.len() / 2
    }

    pub fn half_edges(&self) -> &[HalfEdge] {
        &self.half_edges
    }

    pub fn face_edges(&self, f: FaceId) -> &[EdgeId] {
        &self.faces[f]
    }

    pub fn face_vertices(&self, f: FaceId) -> Vec<VertexId> {
        self.faces[f]
            .iter()
            .map(|&h| self.half_edges[h].origin)
            .collect()
    }

    pub fn origin(&self, h: EdgeId) -> VertexId {
        self.half_edges[h].origin
    }

    pub fn twin(&self, h: EdgeId) -> EdgeId {
        self.half_edges[h].twin
    }

    pub fn prev(&self, h: EdgeId) -> EdgeId {
        self.prev[h]
    }

    pub fn face_of(&self, h: EdgeId) -> Option<FaceId> {
        self.half_edges[h].face
    }

    /// Outgoing directed edges of each vertex in counterclockwise order.
    pub fn rotations(&self) -> Vec<Vec<EdgeId>> {
        let mut rot = vec![Vec::new(); self.num_vertices];
        let mut done = vec![false; self.half_edges.len()];
        for start in 0..self.half_edges.len() {
            let v = self.origin(start);
            if done[start] || !rot[v].is_empty() {
                continue;
            }
            let mut h = start;
            loop {
                done[h] = true;
                rot[v].push(h);
                h = self.twin(self.prev(h));
                if h == start || done[h] {
                    break;
                }
            }
        }
        rot
    }

    pub fn is_connected(&self) -> bool {
        let mut adj = vec![Vec::new(); self.num_vertices];
        for he in &self.half_edges {
            let t = self.half_edges[he.twin].origin;
            adj[he.origin].push(t);
        }
        let mut seen = vec![false; self.num_vertices];
        let mut stack = vec![0];
        if self.num_vertices == 0 {
            return true;
        }
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }
}
