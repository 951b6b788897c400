use std::fmt;

use serde::Serialize;

use super::{EdgeId, FaceId, Offset, QuadMesh, Surface, VertexId};

/// One violated mesh invariant.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Diagnostic {
    TwinNotInvolutive { edge: EdgeId },
    NextNotPermutation { edge: EdgeId },
    OriginMismatch { edge: EdgeId },
    FaceDegree { face: FaceId, degree: usize },
    FaceCycleMismatch { face: FaceId },
    UncoveredEdge { edge: EdgeId },
    OuterWalks { count: usize },
    IsolatedVertex { vertex: VertexId },
    Euler { value: i64, expected: i64 },
    OffsetNotAntisymmetric { edge: EdgeId },
    FaceOffsetSum { face: FaceId, sum: Offset },
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnostic::TwinNotInvolutive { edge } => {
                write!(f, "twin not involutive at edge {edge}")
            }
            Diagnostic::NextNotPermutation { edge } => {
                write!(f, "edge {edge} is the successor of more than one edge")
            }
            Diagnostic::OriginMismatch { edge } => write!(
                f,
                "edge {edge}: successor does not start where the edge ends"
            ),
            Diagnostic::FaceDegree { face, degree } => {
                write!(f, "face {face} has degree {degree} ≠ 4")
            }
            Diagnostic::FaceCycleMismatch { face } => {
                write!(f, "face {face}: edge records disagree with the face cycle")
            }
            Diagnostic::UncoveredEdge { edge } => {
                write!(f, "edge {edge} lies on no face cycle")
            }
            Diagnostic::OuterWalks { count } => {
                write!(f, "outer boundary consists of {count} walks, expected 1")
            }
            Diagnostic::IsolatedVertex { vertex } => {
                write!(f, "vertex {vertex} has no incident edge")
            }
            Diagnostic::Euler { value, expected } => {
                write!(f, "Euler relation fails: V - E + F = {value}, expected {expected}")
            }
            Diagnostic::OffsetNotAntisymmetric { edge } => {
                write!(f, "offset of edge {edge} is not the negation of its twin's")
            }
            Diagnostic::FaceOffsetSum { face, sum } => write!(
                f,
                "face {face}: offsets sum to ({}, {}), expected (0, 0)",
                sum[0], sum[1]
            ),
        }
    }
}

/// Lists every violated invariant; an empty list means the mesh is valid.
pub fn validate_mesh(mesh: &QuadMesh) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let n = mesh.num_half_edges();
    let hes = mesh.half_edges();

    let mut structural = false;
    for (h, he) in hes.iter().enumerate() {
        if he.twin >= n || he.twin == h || hes[he.twin].twin != h {
            out.push(Diagnostic::TwinNotInvolutive { edge: h });
            structural = true;
        }
    }
    let mut pred_count = vec![0usize; n];
    for he in hes {
        if he.next < n {
            pred_count[he.next] += 1;
        }
    }
    for (h, &c) in pred_count.iter().enumerate() {
        if c != 1 {
            out.push(Diagnostic::NextNotPermutation { edge: h });
            structural = true;
        }
    }
    if structural {
        return out;
    }
    for (h, he) in hes.iter().enumerate() {
        if hes[he.next].origin != hes[he.twin].origin {
            out.push(Diagnostic::OriginMismatch { edge: h });
        }
    }

    // Walk every next-orbit; bounded orbits must match a face of degree 4.
    let mut covered = vec![false; n];
    for (f, edges) in mesh.faces().iter().enumerate() {
        let mut cycle = vec![edges[0]];
        let mut h = hes[edges[0]].next;
        while h != edges[0] && cycle.len() <= n {
            cycle.push(h);
            h = hes[h].next;
        }
        if cycle.len() != 4 {
            out.push(Diagnostic::FaceDegree {
                face: f,
                degree: cycle.len(),
            });
        } else if cycle != edges.as_slice() || cycle.iter().any(|&h| hes[h].face != Some(f)) {
            out.push(Diagnostic::FaceCycleMismatch { face: f });
        }
        for h in cycle {
            covered[h] = true;
        }
    }
    let mut outer_walks = 0;
    for start in 0..n {
        if covered[start] {
            continue;
        }
        if hes[start].face.is_some() {
            out.push(Diagnostic::UncoveredEdge { edge: start });
            covered[start] = true;
            continue;
        }
        outer_walks += 1;
        let mut h = start;
        while !covered[h] {
            covered[h] = true;
            h = hes[h].next;
        }
    }

    let mut has_edge = vec![false; mesh.num_vertices()];
    for he in hes {
        if he.origin < has_edge.len() {
            has_edge[he.origin] = true;
        }
    }
    for (v, &ok) in has_edge.iter().enumerate() {
        if !ok {
            out.push(Diagnostic::IsolatedVertex { vertex: v });
        }
    }

    let v = mesh.num_vertices() as i64;
    let e = mesh.num_edges() as i64;
    let bounded = mesh.num_faces() as i64;
    match mesh.surface() {
        Surface::Planar => {
            if outer_walks != 1 {
                out.push(Diagnostic::OuterWalks { count: outer_walks });
            }
            let value = v - e + bounded + 1;
            if value != 2 {
                out.push(Diagnostic::Euler { value, expected: 2 });
            }
        }
        Surface::Torus => {
            if outer_walks != 0 {
                out.push(Diagnostic::OuterWalks { count: outer_walks });
            }
            let value = v - e + bounded;
            if value != 0 {
                out.push(Diagnostic::Euler { value, expected: 0 });
            }
            for h in 0..n {
                let (a, b) = (mesh.offset(h), mesh.offset(hes[h].twin));
                if a[0] != -b[0] || a[1] != -b[1] {
                    out.push(Diagnostic::OffsetNotAntisymmetric { edge: h });
                }
            }
            for (f, edges) in mesh.faces().iter().enumerate() {
                let sum = edges.iter().fold([0, 0], |acc, &h| {
                    let o = mesh.offset(h);
                    [acc[0] + o[0], acc[1] + o[1]]
                });
                if sum != [0, 0] {
                    out.push(Diagnostic::FaceOffsetSum { face: f, sum });
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate;

    #[test]
    fn finite_grid_is_valid() {
        assert!(validate_mesh(&generate::grid(3, 2)).is_empty());
    }

    #[test]
    fn torus_grid_is_valid() {
        for (w, h) in [(1, 1), (2, 2), (3, 1), (4, 3)] {
            let mesh = generate::torus_grid(w, h);
            assert!(validate_mesh(&mesh).is_empty(), "{w}x{h}");
        }
    }

    #[test]
    fn broken_twin_is_reported() {
        let mesh = generate::grid(1, 1);
        let mut hes = mesh.half_edges().to_vec();
        hes[0].twin = hes[1].twin;
        let broken = QuadMesh::from_raw_parts(
            Surface::Planar,
            mesh.num_vertices(),
            hes,
            mesh.faces().to_vec(),
            mesh.offsets().to_vec(),
        );
        let report = validate_mesh(&broken);
        assert!(report.contains(&Diagnostic::TwinNotInvolutive { edge: 0 }));
        assert!(report
            .iter()
            .any(|d| d.to_string().starts_with("twin not involutive")));
    }

    #[test]
    fn face_offset_sum_names_the_face() {
        let mesh = generate::torus_grid(2, 2);
        let mut offsets = mesh.offsets().to_vec();
        // Shift one interior edge and its twin by (1, 0): both adjacent faces
        // now have a nonzero offset sum.
        let h = 0;
        let t = mesh.twin(h);
        offsets[h][0] += 1;
        offsets[t][0] -= 1;
        let broken = QuadMesh::from_raw_parts(
            Surface::Torus,
            mesh.num_vertices(),
            mesh.half_edges().to_vec(),
            mesh.faces().to_vec(),
            offsets,
        );
        let report = validate_mesh(&broken);
        let f = mesh.face_of(h).unwrap();
        assert!(report.contains(&Diagnostic::FaceOffsetSum {
            face: f,
            sum: [1, 0]
        }));
        assert!(report
            .iter()
            .any(|d| d.to_string() == format!("face {f}: offsets sum to (1, 0), expected (0, 0)")));
    }
}
