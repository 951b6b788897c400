//! Diamond graph of a planar map: vertices are the primal vertices and the
//! bounded primal faces, with an edge for every incidence. Each interior
//! primal edge `a -> b` between faces `f` (left) and `g` (right) becomes the
//! quad `[a, g, b, f]`. The outer face is left out, so boundary incidences
//! stay as edges on no quad.

use serde::Serialize;

use crate::mesh::{EdgeId, HalfEdge, PlanarMap, QuadMesh, VertexId};
use crate::{Error, Result, Surface};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VertexTag {
    PrimalVertex,
    PrimalFace,
}

#[derive(Clone, Debug)]
pub struct DiamondMesh {
    pub mesh: QuadMesh,
    pub tags: Vec<VertexTag>,
    pub num_primal_vertices: usize,
    /// Corner vertices of each bounded primal face, counterclockwise.
    pub primal_faces: Vec<Vec<VertexId>>,
    /// Primal directed edge behind each quad.
    pub quad_edges: Vec<EdgeId>,
}

impl DiamondMesh {
    /// Diamond vertex standing for primal face `f`.
    pub fn center(&self, f: usize) -> VertexId {
        self.num_primal_vertices + f
    }
}

pub fn diamond_graph(map: &PlanarMap) -> Result<DiamondMesh> {
    if !map.is_connected() {
        return Err(Error::Diamond("input map is not connected".into()));
    }
    let nv = map.num_vertices();
    let nf = map.num_faces();
    // Corner (f, i) of the primal map is the incidence of face f with its
    // i-th vertex; it yields the half-edges vertex -> center ("up") and
    // center -> vertex ("down").
    let mut corner_base = Vec::with_capacity(nf);
    let mut corners = 0;
    for f in 0..nf {
        corner_base.push(corners);
        corners += map.face_edges(f).len();
    }
    let corner_of = |h: EdgeId| -> usize {
        let f = map.face_of(h).unwrap();
        let i = map.face_edges(f).iter().position(|&g| g == h).unwrap();
        corner_base[f] + i
    };
    let next_corner = |c: usize, f: usize| {
        let n = map.face_edges(f).len();
        corner_base[f] + (c - corner_base[f] + 1) % n
    };

    // up[c], down[c] receive ids; quads first so face q owns 4q..4q+4.
    let mut up = vec![usize::MAX; corners];
    let mut down = vec![usize::MAX; corners];
    let mut quads = Vec::new();
    let mut quad_edges = Vec::new();
    let mut id = 0;
    for h in 0..map.half_edges().len() {
        let t = map.twin(h);
        let (Some(f), Some(g)) = (map.face_of(h), map.face_of(t)) else {
            continue;
        };
        if h > t {
            continue;
        }
        // h = a -> b with f on its left; t = b -> a with g on its left.
        let ca = corner_of(h);
        let cb = next_corner(ca, f);
        let cb_g = corner_of(t);
        let ca_g = next_corner(cb_g, g);
        up[ca_g] = id; // a -> g
        down[cb_g] = id + 1; // g -> b
        up[cb] = id + 2; // b -> f
        down[ca] = id + 3; // f -> a
        quads.push([id, id + 1, id + 2, id + 3]);
        quad_edges.push(h);
        id += 4;
    }
    for c in 0..corners {
        for slot in [&mut up[c], &mut down[c]] {
            if *slot == usize::MAX {
                *slot = id;
                id += 1;
            }
        }
    }

    let mut corner_face = vec![0; corners];
    let mut corner_vertex = vec![0; corners];
    for f in 0..nf {
        for (i, v) in map.face_vertices(f).into_iter().enumerate() {
            corner_face[corner_base[f] + i] = f;
            corner_vertex[corner_base[f] + i] = v;
        }
    }
    let mut hes = vec![
        HalfEdge {
            origin: 0,
            twin: 0,
            next: 0,
            face: None,
        };
        id
    ];
    for c in 0..corners {
        hes[up[c]].origin = corner_vertex[c];
        hes[up[c]].twin = down[c];
        hes[down[c]].origin = nv + corner_face[c];
        hes[down[c]].twin = up[c];
    }
    for (q, quad) in quads.iter().enumerate() {
        for &h in quad {
            hes[h].face = Some(q);
        }
    }

    // Counterclockwise rotations. Around a center: its corners in face
    // order. Around a primal vertex: its bounded-face corners in the order
    // of the primal rotation.
    let mut rot: Vec<Vec<EdgeId>> = vec![Vec::new(); nv + nf];
    for f in 0..nf {
        let n = map.face_edges(f).len();
        rot[nv + f] = (0..n).map(|i| down[corner_base[f] + i]).collect();
    }
    for (v, edges) in map.rotations().into_iter().enumerate() {
        rot[v] = edges
            .into_iter()
            .filter(|&h| map.face_of(h).is_some())
            .map(|h| up[corner_of(h)])
            .collect();
        if rot[v].is_empty() {
            return Err(Error::Diamond(format!(
                "vertex {v} lies on no bounded face"
            )));
        }
    }
    let mut cw = vec![usize::MAX; id];
    for r in &rot {
        for k in 0..r.len() {
            cw[r[k]] = r[(k + r.len() - 1) % r.len()];
        }
    }
    for h in 0..id {
        hes[h].next = cw[hes[h].twin];
    }

    let mut tags = vec![VertexTag::PrimalVertex; nv];
    tags.extend(std::iter::repeat_n(VertexTag::PrimalFace, nf));
    let mesh = QuadMesh::from_raw_parts(Surface::Planar, nv + nf, hes, quads, vec![[0, 0]; id]);
    Ok(DiamondMesh {
        mesh,
        tags,
        num_primal_vertices: nv,
        primal_faces: (0..nf).map(|f| map.face_vertices(f)).collect(),
        quad_edges,
    })
}
