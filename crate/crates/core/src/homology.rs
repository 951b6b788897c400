//! Homology classes of closed tracks on a torus mesh.
//!
//! A spanning tree of the mesh graph gives every vertex a deck copy; each
//! non-tree edge closes a fundamental cycle whose class is its offset sum.
//! The class `[t]` of a track is fixed by its signed crossing numbers with
//! two fundamental cycles of independent classes, via
//! `[t] ∧ [c] = crossings(t, c)`.

use std::fmt;

use serde::Serialize;

use crate::mesh::{EdgeId, Offset, QuadMesh, VertexId};
use crate::tracks::TrackSystem;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct HomologyClass {
    pub p: i64,
    pub q: i64,
}

impl HomologyClass {
    pub fn new(p: i64, q: i64) -> Self {
        HomologyClass { p, q }
    }

    pub fn is_zero(self) -> bool {
        self.p == 0 && self.q == 0
    }

    /// `p_1 q_2 - p_2 q_1`.
    pub fn wedge(self, other: HomologyClass) -> i64 {
        self.p * other.q - self.q * other.p
    }
}

impl fmt::Display for HomologyClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.p, self.q)
    }
}

/// Spanning-tree data shared by homology and embedding code.
pub(crate) struct TreeCycles {
    pub order: Vec<VertexId>,
    pub parent: Vec<Option<EdgeId>>,
    /// Deck copy of each vertex reached through the tree.
    pub copy: Vec<Offset>,
    /// Two non-tree edges closing cycles of independent classes.
    pub basis: [(EdgeId, Offset); 2],
}

pub(crate) fn tree_order(mesh: &QuadMesh, parent: &[Option<EdgeId>], root: VertexId) -> Vec<VertexId> {
    let mut children = vec![Vec::new(); mesh.num_vertices()];
    for (v, p) in parent.iter().enumerate() {
        if let Some(h) = *p {
            children[mesh.origin(h)].push(v);
        }
    }
    let mut order = vec![root];
    let mut i = 0;
    while i < order.len() {
        let v = order[i];
        order.extend(children[v].iter().copied());
        i += 1;
    }
    order
}

pub(crate) fn fundamental_cycles(
    mesh: &QuadMesh,
    parent: Vec<Option<EdgeId>>,
    root: VertexId,
) -> Result<TreeCycles> {
    if !mesh.is_torus() {
        return Err(Error::WrongSurface {
            expected: crate::Surface::Torus,
        });
    }
    let order = tree_order(mesh, &parent, root);
    if order.len() != mesh.num_vertices() {
        return Err(Error::Homology("mesh graph is not connected".into()));
    }
    let mut copy = vec![[0i64, 0]; mesh.num_vertices()];
    for &v in &order[1..] {
        let h = parent[v].unwrap();
        let (u, o) = (mesh.origin(h), mesh.offset(h));
        copy[v] = [copy[u][0] + o[0], copy[u][1] + o[1]];
    }
    let is_tree = |h: EdgeId| {
        let g = mesh.twin(h);
        parent[mesh.target(h)] == Some(h) || parent[mesh.target(g)] == Some(g)
    };
    let mut first: Option<(EdgeId, Offset)> = None;
    let mut basis = None;
    for h in 0..mesh.num_half_edges() {
        if h > mesh.twin(h) || is_tree(h) {
            continue;
        }
        let (u, v, o) = (mesh.origin(h), mesh.target(h), mesh.offset(h));
        let c = [copy[u][0] + o[0] - copy[v][0], copy[u][1] + o[1] - copy[v][1]];
        if c == [0, 0] {
            continue;
        }
        match first {
            None => first = Some((h, c)),
            Some((g, d)) if d[0] * c[1] - d[1] * c[0] != 0 => {
                basis = Some([(g, d), (h, c)]);
                break;
            }
            _ => {}
        }
    }
    let basis =
        basis.ok_or_else(|| Error::Homology("no two fundamental cycles of independent class".into()))?;
    Ok(TreeCycles {
        order,
        parent,
        copy,
        basis,
    })
}

/// Signed crossing number of `track` with the tree path from the root to
/// each vertex; `+1` when an edge runs from the track's right to its left.
fn tree_crossings(mesh: &QuadMesh, system: &TrackSystem, tc: &TreeCycles, track: usize) -> Vec<i64> {
    let mut tau = vec![0i64; mesh.num_vertices()];
    for &v in &tc.order[1..] {
        let h = tc.parent[v].unwrap();
        tau[v] = tau[mesh.origin(h)] + crossing_sign(system, h, track);
    }
    tau
}

fn crossing_sign(system: &TrackSystem, h: EdgeId, track: usize) -> i64 {
    match system.edge_track(h) {
        Some((t, left)) if t == track => {
            if left {
                1
            } else {
                -1
            }
        }
        _ => 0,
    }
}

/// Classes of all tracks, indexed by track id.
pub fn homology_classes(mesh: &QuadMesh, system: &TrackSystem) -> Result<Vec<HomologyClass>> {
    let tc = fundamental_cycles(mesh, mesh.bfs_tree(0), 0)?;
    (0..system.len())
        .map(|t| class_with(mesh, system, &tc, t))
        .collect()
}

pub fn homology_class(mesh: &QuadMesh, system: &TrackSystem, track: usize) -> Result<HomologyClass> {
    let tc = fundamental_cycles(mesh, mesh.bfs_tree(0), 0)?;
    class_with(mesh, system, &tc, track)
}

fn class_with(
    mesh: &QuadMesh,
    system: &TrackSystem,
    tc: &TreeCycles,
    track: usize,
) -> Result<HomologyClass> {
    let tau = tree_crossings(mesh, system, tc, track);
    let k: Vec<i64> = tc
        .basis
        .iter()
        .map(|&(h, _)| {
            tau[mesh.origin(h)] + crossing_sign(system, h, track) - tau[mesh.target(h)]
        })
        .collect();
    let (c1, c2) = (tc.basis[0].1, tc.basis[1].1);
    // p c_y - q c_x = k for both cycles.
    let det = c1[0] * c2[1] - c1[1] * c2[0];
    let pn = c1[0] * k[1] - c2[0] * k[0];
    let qn = c1[1] * k[1] - c2[1] * k[0];
    if pn % det != 0 || qn % det != 0 {
        return Err(Error::Homology(format!(
            "crossing numbers of track {track} are not consistent with an integer class"
        )));
    }
    Ok(HomologyClass::new(pn / det, qn / det))
}
