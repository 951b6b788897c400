//! Combinatorial quad meshes stored as directed-edge (half-edge) records.
//!
//! A [`QuadMesh`] is either planar (a finite disk with one outer walk) or a
//! torus mesh carrying an integer translation per directed edge. Every
//! bounded face is a counterclockwise cycle of four directed edges; on a
//! planar mesh the remaining directed edges form the outer walk, which keeps
//! the outer face on its left and therefore runs clockwise around the mesh.
//!
//! Ids are dense and fixed by input order: vertex ids come from the file,
//! face `f` owns directed edges `4f..4f+4` in corner order, and outer
//! directed edges (planar only) follow in the order their interior twins
//! were created.

mod build;
mod io;
mod validate;

pub use build::PlanarMap;
pub use io::{parse_mesh, parse_planar_map, serialize_mesh};
pub use validate::{validate_mesh, Diagnostic};

use std::collections::VecDeque;

pub type VertexId = usize;
pub type EdgeId = usize;
pub type FaceId = usize;

/// Translation between fundamental-domain copies, in units of the two deck
/// generators.
pub type Offset = [i64; 2];

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Surface {
    Planar,
    Torus,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HalfEdge {
    pub origin: VertexId,
    pub twin: EdgeId,
    pub next: EdgeId,
    /// `None` on the outer walk.
    pub face: Option<FaceId>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadMesh {
    surface: Surface,
    num_vertices: usize,
    half_edges: Vec<HalfEdge>,
    prev: Vec<EdgeId>,
    faces: Vec<[EdgeId; 4]>,
    offsets: Vec<Offset>,
}

impl QuadMesh {
    /// Builds a mesh from counterclockwise vertex quadruples. `offsets` is
    /// indexed like the face corners (`4f + i` is the edge leaving corner
    /// `i` of face `f`) and ignored for planar meshes.
    pub fn from_faces(
        surface: Surface,
        num_vertices: usize,
        faces: &[[VertexId; 4]],
        offsets: &[Offset],
    ) -> Result<Self, crate::MeshError> {
        let polys: Vec<Vec<VertexId>> = faces.iter().map(|f| f.to_vec()).collect();
        let built = build::build_half_edges(surface, num_vertices, &polys, offsets)?;
        let faces = built
            .face_edges
            .iter()
            .map(|edges| [edges[0], edges[1], edges[2], edges[3]])
            .collect();
        let mut offsets = offsets.to_vec();
        offsets.resize(built.half_edges.len(), [0, 0]);
        if surface == Surface::Planar {
            offsets.iter_mut().for_each(|o| *o = [0, 0]);
        }
        Ok(Self::from_raw_parts(
            surface,
            num_vertices,
            built.half_edges,
            faces,
            offsets,
        ))
    }

    /// Assembles a mesh without any structural checks; [`validate_mesh`]
    /// reports what is wrong with it.
    pub fn from_raw_parts(
        surface: Surface,
        num_vertices: usize,
        half_edges: Vec<HalfEdge>,
        faces: Vec<[EdgeId; 4]>,
        offsets: Vec<Offset>,
    ) -> Self {
        let mut prev = vec![usize::MAX; half_edges.len()];
        for (h, he) in half_edges.iter().enumerate() {
            if he.next < prev.len() {
                prev[he.next] = h;
            }
        }
        QuadMesh {
            surface,
            num_vertices,
            half_edges,
            prev,
            faces,
            offsets,
        }
    }

    pub fn surface(&self) -> Surface {
        self.surface
    }

    pub fn is_torus(&self) -> bool {
        self.surface == Surface::Torus
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn num_half_edges(&self) -> usize {
        self.half_edges.len()
    }

    /// Undirected edges.
    pub fn num_edges(&self) -> usize {
        self.half_edges.len() / 2
    }

    /// Bounded faces only.
    pub fn num_faces(&self) -> usize {
        self.faces.len()
    }

    pub fn half_edges(&self) -> &[HalfEdge] {
        &self.half_edges
    }

    pub fn origin(&self, h: EdgeId) -> VertexId {
        self.half_edges[h].origin
    }

    pub fn target(&self, h: EdgeId) -> VertexId {
        self.half_edges[self.half_edges[h].twin].origin
    }

    pub fn twin(&self, h: EdgeId) -> EdgeId {
        self.half_edges[h].twin
    }

    pub fn next(&self, h: EdgeId) -> EdgeId {
        self.half_edges[h].next
    }

    pub fn prev(&self, h: EdgeId) -> EdgeId {
        self.prev[h]
    }

    pub fn face_of(&self, h: EdgeId) -> Option<FaceId> {
        self.half_edges[h].face
    }

    pub fn is_outer(&self, h: EdgeId) -> bool {
        self.half_edges[h].face.is_none()
    }

    /// The four directed edges of `f` in counterclockwise order.
    pub fn face_edges(&self, f: FaceId) -> [EdgeId; 4] {
        self.faces[f]
    }

    pub fn face_vertices(&self, f: FaceId) -> [VertexId; 4] {
        self.faces[f].map(|h| self.origin(h))
    }

    pub fn faces(&self) -> &[[EdgeId; 4]] {
        &self.faces
    }

    /// Deck translation carried by `h`; always zero on planar meshes.
    pub fn offset(&self, h: EdgeId) -> Offset {
        self.offsets[h]
    }

    pub fn offsets(&self) -> &[Offset] {
        &self.offsets
    }

    /// Directed edges of the outer walk, starting from the smallest id.
    /// Empty for torus meshes.
    pub fn outer_walk(&self) -> Vec<EdgeId> {
        let Some(start) = (0..self.half_edges.len()).find(|&h| self.is_outer(h)) else {
            return Vec::new();
        };
        let mut walk = vec![start];
        let mut h = self.next(start);
        while h != start && walk.len() <= self.half_edges.len() {
            walk.push(h);
            h = self.next(h);
        }
        walk
    }

    /// Vertices lying on the outer walk.
    pub fn boundary_vertices(&self) -> Vec<bool> {
        let mut on = vec![false; self.num_vertices];
        for (h, he) in self.half_edges.iter().enumerate() {
            if he.face.is_none() {
                on[self.origin(h)] = true;
            }
        }
        on
    }

    /// Outgoing directed edges per vertex, in id order.
    pub fn outgoing(&self) -> Vec<Vec<EdgeId>> {
        let mut out = vec![Vec::new(); self.num_vertices];
        for (h, he) in self.half_edges.iter().enumerate() {
            out[he.origin].push(h);
        }
        out
    }

    /// Breadth-first spanning tree from `root`: for every vertex other than
    /// the root, the directed edge through which it was first reached.
    pub fn bfs_tree(&self, root: VertexId) -> Vec<Option<EdgeId>> {
        let out = self.outgoing();
        let mut parent = vec![None; self.num_vertices];
        let mut seen = vec![false; self.num_vertices];
        let mut queue = VecDeque::from([root]);
        seen[root] = true;
        while let Some(v) = queue.pop_front() {
            for &h in &out[v] {
                let w = self.target(h);
                if !seen[w] {
                    seen[w] = true;
                    parent[w] = Some(h);
                    queue.push_back(w);
                }
            }
        }
        parent
    }

    pub fn is_connected(&self) -> bool {
        if self.num_vertices == 0 {
            return true;
        }
        let tree = self.bfs_tree(0);
        (1..self.num_vertices).all(|v| tree[v].is_some())
    }
}
