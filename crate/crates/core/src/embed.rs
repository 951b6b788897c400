//! Coordinates from transversal angles, and their validation.
//!
//! Crossing a directed edge moves by the transversal of the oriented track
//! it crosses from right to left. Summing along any path from the base
//! vertex gives the same point, so a spanning tree suffices. On a torus the
//! two period vectors come from two fundamental cycles.

use std::f64::consts::{PI, TAU};

use rand::Rng;
use serde::Serialize;

use crate::angles::{strict_violation, TransversalAssignment};
use crate::diamond::{DiamondMesh, VertexTag};
use crate::geometry::{bbox, convex_overlap, signed_area, unit, wedge, SpatialHash, Vec2};
use crate::homology::{self, tree_order};
use crate::mesh::{EdgeId, Offset, QuadMesh, VertexId};
use crate::tracks::{check_embeddable_finite, check_embeddable_torus, TrackSystem};
use crate::{Error, MeshError, Result, Surface};

/// Tolerance of every geometric check.
pub const TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RhombicEmbedding {
    pub positions: Vec<Vec2>,
    /// Images of the two deck generators (torus only).
    pub periods: Option<[Vec2; 2]>,
    pub theta: TransversalAssignment,
    /// Edge length per track; all ones for a rhombic embedding.
    pub lengths: Vec<f64>,
}

impl RhombicEmbedding {
    fn shift(&self, o: Offset) -> Vec2 {
        match self.periods {
            Some([p1, p2]) => p1 * o[0] as f64 + p2 * o[1] as f64,
            None => Vec2::zeros(),
        }
    }

    /// Displacement along directed edge `h`, including its deck offset.
    pub fn edge_vector(&self, mesh: &QuadMesh, h: EdgeId) -> Vec2 {
        self.positions[mesh.target(h)] + self.shift(mesh.offset(h)) - self.positions[mesh.origin(h)]
    }

    /// Corners of face `f` in the frame of its first corner.
    pub fn face_polygon(&self, mesh: &QuadMesh, f: usize) -> [Vec2; 4] {
        let e = mesh.face_edges(f);
        let v = mesh.face_vertices(f);
        let mut copy = [0i64, 0];
        let mut out = [Vec2::zeros(); 4];
        for i in 0..4 {
            out[i] = self.positions[v[i]] + self.shift(copy);
            let o = mesh.offset(e[i]);
            copy = [copy[0] + o[0], copy[1] + o[1]];
        }
        out
    }

    /// `P1 ∧ P2` for a torus embedding.
    pub fn domain_area(&self) -> Option<f64> {
        self.periods.map(|[a, b]| wedge(&a, &b))
    }
}

fn require_finite(mesh: &QuadMesh) -> Result<()> {
    if mesh.is_torus() {
        return Err(Error::WrongSurface {
            expected: Surface::Planar,
        });
    }
    Ok(())
}

fn require_torus(mesh: &QuadMesh) -> Result<()> {
    if !mesh.is_torus() {
        return Err(Error::WrongSurface {
            expected: Surface::Torus,
        });
    }
    Ok(())
}

/// Places the track ends at equally spaced points of a circle in the order
/// of the outer walk and gives each track the left normal of its chord.
pub fn boundary_chord_assignment(mesh: &QuadMesh, system: &TrackSystem) -> Result<TransversalAssignment> {
    require_finite(mesh)?;
    let violations = check_embeddable_finite(mesh, system);
    if !violations.is_empty() {
        return Err(Error::NotEmbeddable(violations));
    }
    let walk = mesh.outer_walk();
    let mut slot = vec![usize::MAX; mesh.num_half_edges()];
    for (m, &h) in walk.iter().enumerate() {
        slot[h] = m;
    }
    // The outer walk runs clockwise, so the points go clockwise too.
    let point = |h: EdgeId| unit(-TAU * slot[h] as f64 / walk.len() as f64);
    let angles = system
        .tracks()
        .iter()
        .map(|t| {
            let (start, end) = t.ends(mesh).expect("open track");
            let chord = point(end) - point(start);
            chord.y.atan2(chord.x) + PI / 2.0
        })
        .collect();
    Ok(TransversalAssignment::new(angles))
}

/// Transversal of each track perpendicular to its homology class `(p, q)`,
/// namely the direction of `(-q, p)`.
pub fn torus_default_assignment(mesh: &QuadMesh, system: &TrackSystem) -> Result<TransversalAssignment> {
    require_torus(mesh)?;
    let violations = check_embeddable_torus(mesh, system);
    if !violations.is_empty() {
        return Err(Error::NotEmbeddable(violations));
    }
    let classes = homology::homology_classes(mesh, system)?;
    Ok(TransversalAssignment::new(
        classes
            .iter()
            .map(|c| (c.p as f64).atan2(-(c.q as f64)))
            .collect(),
    ))
}

/// First vertex with an edge on some track.
fn base_vertex(mesh: &QuadMesh, system: &TrackSystem) -> VertexId {
    let mut best = None;
    for h in 0..mesh.num_half_edges() {
        if system.edge_track(h).is_some() {
            let v = mesh.origin(h);
            if best.is_none_or(|b| v < b) {
                best = Some(v);
            }
        }
    }
    best.unwrap_or(0)
}

/// Breadth-first tree over edges that lie on tracks.
pub fn bfs_track_tree(mesh: &QuadMesh, system: &TrackSystem) -> (VertexId, Vec<Option<EdgeId>>) {
    let root = base_vertex(mesh, system);
    let out = mesh.outgoing();
    let mut parent = vec![None; mesh.num_vertices()];
    let mut seen = vec![false; mesh.num_vertices()];
    seen[root] = true;
    let mut queue = std::collections::VecDeque::from([root]);
    while let Some(v) = queue.pop_front() {
        for &h in &out[v] {
            let w = mesh.target(h);
            if !seen[w] && system.edge_track(h).is_some() {
                seen[w] = true;
                parent[w] = Some(h);
                queue.push_back(w);
            }
        }
    }
    (root, parent)
}

/// Spanning tree grown from a random frontier edge at each step.
pub fn random_track_tree<R: Rng + ?Sized>(
    mesh: &QuadMesh,
    system: &TrackSystem,
    rng: &mut R,
) -> (VertexId, Vec<Option<EdgeId>>) {
    let root = base_vertex(mesh, system);
    let out = mesh.outgoing();
    let mut parent = vec![None; mesh.num_vertices()];
    let mut seen = vec![false; mesh.num_vertices()];
    seen[root] = true;
    let mut frontier: Vec<EdgeId> = out[root].clone();
    while !frontier.is_empty() {
        let h = frontier.swap_remove(rng.gen_range(0..frontier.len()));
        let w = mesh.target(h);
        if seen[w] || system.edge_track(h).is_none() {
            continue;
        }
        seen[w] = true;
        parent[w] = Some(h);
        frontier.extend(out[w].iter().copied());
    }
    (root, parent)
}

pub fn build_embedding(
    mesh: &QuadMesh,
    system: &TrackSystem,
    theta: &TransversalAssignment,
) -> Result<RhombicEmbedding> {
    let (root, parent) = bfs_track_tree(mesh, system);
    build_embedding_with_tree(mesh, system, theta, root, &parent)
}

pub fn build_embedding_with_tree(
    mesh: &QuadMesh,
    system: &TrackSystem,
    theta: &TransversalAssignment,
    root: VertexId,
    parent: &[Option<EdgeId>],
) -> Result<RhombicEmbedding> {
    build_scaled(mesh, system, theta, root, parent, vec![1.0; system.len()])
}

fn build_scaled(
    mesh: &QuadMesh,
    system: &TrackSystem,
    theta: &TransversalAssignment,
    root: VertexId,
    parent: &[Option<EdgeId>],
    lengths: Vec<f64>,
) -> Result<RhombicEmbedding> {
    theta.check_len(system.len())?;
    if let Some((from, to)) = strict_violation(theta, system.digraph()) {
        return Err(Error::NotStrictlyOrderPreserving { from, to });
    }
    let step = |h: EdgeId| -> Vec2 {
        let t = system.crossed_by(h).expect("tree edges lie on tracks");
        theta.unit(t) * lengths[t.track]
    };
    let order = tree_order(mesh, parent, root);
    let mut disp = vec![Vec2::zeros(); mesh.num_vertices()];
    for &v in &order[1..] {
        let h = parent[v].unwrap();
        disp[v] = disp[mesh.origin(h)] + step(h);
    }

    let (positions, periods) = if mesh.is_torus() {
        let tc = homology::fundamental_cycles(mesh, parent.to_vec(), root)?;
        let w: Vec<Vec2> = tc
            .basis
            .iter()
            .map(|&(h, _)| disp[mesh.origin(h)] + step(h) - disp[mesh.target(h)])
            .collect();
        let (c1, c2) = (tc.basis[0].1, tc.basis[1].1);
        let det = (c1[0] * c2[1] - c1[1] * c2[0]) as f64;
        let p1 = (w[0] * c2[1] as f64 - w[1] * c1[1] as f64) / det;
        let p2 = (w[1] * c1[0] as f64 - w[0] * c2[0] as f64) / det;
        let pos = (0..mesh.num_vertices())
            .map(|v| disp[v] - p1 * tc.copy[v][0] as f64 - p2 * tc.copy[v][1] as f64)
            .collect();
        (pos, Some([p1, p2]))
    } else {
        let mut placed: Vec<Option<Vec2>> = vec![None; mesh.num_vertices()];
        for &v in &order {
            placed[v] = Some(disp[v]);
        }
        place_pendants(mesh, &mut placed);
        let pos = placed
            .into_iter()
            .enumerate()
            .map(|(v, p)| {
                p.ok_or_else(|| {
                    Error::Mesh(MeshError::Structure(format!(
                        "vertex {v} is not connected to vertex {root}"
                    )))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        (pos, None)
    };
    let mut positions: Vec<Vec2> = positions;
    if let Some(&origin) = positions.first() {
        for p in &mut positions {
            *p -= origin;
        }
    }
    Ok(RhombicEmbedding {
        positions,
        periods,
        theta: theta.clone(),
        lengths,
    })
}

/// Places vertices reachable only through edges on no track (the pendant
/// edges of a diamond graph). Each run of unplaced neighbours in the
/// rotation around a placed vertex is spread evenly over the angular gap
/// between the placed neighbours on either side, at unit distance.
fn place_pendants(mesh: &QuadMesh, placed: &mut [Option<Vec2>]) {
    if placed.iter().all(Option::is_none) {
        if let Some(p) = placed.first_mut() {
            *p = Some(Vec2::zeros());
        }
    }
    let out = mesh.outgoing();
    let rotation = |v: VertexId| -> Vec<EdgeId> {
        let Some(&start) = out[v].first() else {
            return Vec::new();
        };
        let mut rot = vec![start];
        let mut g = mesh.twin(mesh.prev(start));
        while g != start && rot.len() <= out[v].len() {
            rot.push(g);
            g = mesh.twin(mesh.prev(g));
        }
        rot
    };
    loop {
        let mut progress = false;
        for c in 0..placed.len() {
            let Some(pc) = placed[c] else { continue };
            let rot = rotation(c);
            if rot.iter().all(|&h| placed[mesh.target(h)].is_some()) {
                continue;
            }
            let dir = |h: EdgeId, placed: &[Option<Vec2>]| {
                let d = placed[mesh.target(h)].unwrap() - pc;
                d.y.atan2(d.x)
            };
            let anchors: Vec<usize> = (0..rot.len())
                .filter(|&k| placed[mesh.target(rot[k])].is_some())
                .collect();
            let n = rot.len();
            if anchors.is_empty() {
                for (k, &h) in rot.iter().enumerate() {
                    let w = mesh.target(h);
                    if placed[w].is_none() {
                        placed[w] = Some(pc + unit(TAU * k as f64 / n as f64));
                    }
                }
                progress = true;
                continue;
            }
            for (i, &a) in anchors.iter().enumerate() {
                let b = anchors[(i + 1) % anchors.len()];
                let run = if anchors.len() == 1 { n - 1 } else { (b + n - a - 1) % n };
                if run == 0 {
                    continue;
                }
                let start = dir(rot[a], placed);
                let mut span = (dir(rot[b], placed) - start).rem_euclid(TAU);
                if anchors.len() == 1 || span == 0.0 {
                    span = TAU;
                }
                for j in 1..=run {
                    let h = rot[(a + j) % n];
                    let w = mesh.target(h);
                    if placed[w].is_none() {
                        let ang = start + span * j as f64 / (run + 1) as f64;
                        placed[w] = Some(pc + unit(ang));
                    }
                }
                progress = true;
            }
        }
        if !progress {
            break;
        }
    }
}

/// Multiplies the edges of each track by a positive factor. Faces become
/// parallelograms with unchanged combinatorics.
pub fn scale_tracks(
    mesh: &QuadMesh,
    system: &TrackSystem,
    emb: &RhombicEmbedding,
    factors: &[f64],
) -> Result<RhombicEmbedding> {
    if factors.len() != system.len() {
        return Err(Error::Length {
            what: "scale factors",
            got: factors.len(),
            expected: system.len(),
        });
    }
    if let Some((t, &f)) = factors.iter().enumerate().find(|(_, f)| !(**f > 0.0)) {
        return Err(Error::NonPositiveFactor { track: t, factor: f });
    }
    let lengths = emb.lengths.iter().zip(factors).map(|(a, b)| a * b).collect();
    let (root, parent) = bfs_track_tree(mesh, system);
    build_scaled(mesh, system, &emb.theta, root, &parent, lengths)
}

/// One failed check.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EmbeddingIssue {
    EdgeLength { edge: EdgeId, length: f64, expected: f64 },
    FaceOrientation { face: usize, area: f64 },
    Overlap { faces: [usize; 2], shift: Offset },
    Periodicity { domain_area: f64, face_area_sum: f64 },
}

impl std::fmt::Display for EmbeddingIssue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EmbeddingIssue::EdgeLength {
                edge,
                length,
                expected,
            } => write!(f, "edge {edge} has length {length}, expected {expected}"),
            EmbeddingIssue::FaceOrientation { face, area } => {
                write!(f, "face {face} has signed area {area}")
            }
            EmbeddingIssue::Overlap { faces, shift } => write!(
                f,
                "faces {} and {} (shifted by ({}, {})) overlap",
                faces[0], faces[1], shift[0], shift[1]
            ),
            EmbeddingIssue::Periodicity {
                domain_area,
                face_area_sum,
            } => write!(
                f,
                "fundamental domain area {domain_area} differs from total face area {face_area_sum}"
            ),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EmbeddingReport {
    pub issues: Vec<EmbeddingIssue>,
    pub max_length_error: f64,
    pub min_face_area: f64,
    pub total_face_area: f64,
    pub pairs_tested: usize,
}

impl EmbeddingReport {
    pub fn is_ok(&self) -> bool {
        self.issues.is_empty()
    }
}

pub fn validate_embedding(mesh: &QuadMesh, system: &TrackSystem, emb: &RhombicEmbedding) -> EmbeddingReport {
    let mut issues = Vec::new();
    let mut max_length_error: f64 = 0.0;
    for h in 0..mesh.num_half_edges() {
        if h > mesh.twin(h) {
            continue;
        }
        let expected = system
            .edge_track(h)
            .map_or(1.0, |(t, _)| emb.lengths.get(t).copied().unwrap_or(1.0));
        let length = emb.edge_vector(mesh, h).norm();
        let err = (length - expected).abs();
        max_length_error = max_length_error.max(err);
        if !(err <= TOL) {
            issues.push(EmbeddingIssue::EdgeLength {
                edge: h,
                length,
                expected,
            });
        }
    }

    let polys: Vec<[Vec2; 4]> = (0..mesh.num_faces()).map(|f| emb.face_polygon(mesh, f)).collect();
    let mut min_face_area = f64::INFINITY;
    let mut total = 0.0;
    for (f, p) in polys.iter().enumerate() {
        let area = signed_area(p);
        min_face_area = min_face_area.min(area);
        total += area;
        if !(area > 1e-12) {
            issues.push(EmbeddingIssue::FaceOrientation { face: f, area });
        }
    }

    // Candidate polygons: every face, and on a torus its 3x3 block of
    // translates.
    let shifts: Vec<Offset> = if mesh.is_torus() {
        (-1..=1).flat_map(|a| (-1..=1).map(move |b| [a, b])).collect()
    } else {
        vec![[0, 0]]
    };
    let mut cands: Vec<(usize, Offset, [Vec2; 4])> = Vec::new();
    for (f, p) in polys.iter().enumerate() {
        for &s in &shifts {
            let d = emb.shift(s);
            cands.push((f, s, p.map(|x| x + d)));
        }
    }
    let cell = emb.lengths.iter().fold(1.0f64, |a, &b| a.max(b)) * 2.0;
    let mut hash = SpatialHash::new(cell);
    for (k, c) in cands.iter().enumerate() {
        let (lo, hi) = bbox(&c.2);
        hash.insert(k, &lo, &hi);
    }
    let mut pairs_tested = 0;
    for (k, c) in cands.iter().enumerate() {
        if c.1 != [0, 0] {
            continue;
        }
        let (lo, hi) = bbox(&c.2);
        for j in hash.query(&lo, &hi) {
            let d = &cands[j];
            // Base copies are compared once; translates always.
            if d.1 == [0, 0] && j <= k {
                continue;
            }
            pairs_tested += 1;
            if convex_overlap(&c.2, &d.2, TOL) {
                issues.push(EmbeddingIssue::Overlap {
                    faces: [c.0, d.0],
                    shift: d.1,
                });
            }
        }
    }

    if let Some(domain_area) = emb.domain_area() {
        if !(domain_area > 0.0) || (domain_area - total).abs() > TOL * total.abs().max(1.0) {
            issues.push(EmbeddingIssue::Periodicity {
                domain_area,
                face_area_sum: total,
            });
        }
    }
    EmbeddingReport {
        issues,
        max_length_error,
        min_face_area: if polys.is_empty() { 0.0 } else { min_face_area },
        total_face_area: total,
        pairs_tested,
    }
}

/// Isoradial embedding read off a rhombic embedding of a diamond graph.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IsoradialView {
    /// Primal vertex coordinates.
    pub vertices: Vec<Vec2>,
    /// Circumcenter of each bounded primal face.
    pub centers: Vec<Vec2>,
    pub max_radius_error: f64,
    /// Every center lies strictly inside its face.
    pub strictly_convex: bool,
}

pub fn isoradial_view(diamond: &DiamondMesh, emb: &RhombicEmbedding) -> Result<IsoradialView> {
    let mesh = &diamond.mesh;
    if diamond.tags.len() != mesh.num_vertices() || emb.positions.len() != mesh.num_vertices() {
        return Err(Error::Diamond("tags and coordinates must cover every vertex".into()));
    }
    for h in 0..mesh.num_half_edges() {
        if diamond.tags[mesh.origin(h)] == diamond.tags[mesh.target(h)] {
            return Err(Error::Diamond(format!(
                "edge {h} joins two vertices with the same tag"
            )));
        }
    }
    let vertices: Vec<Vec2> = (0..mesh.num_vertices())
        .filter(|&v| diamond.tags[v] == VertexTag::PrimalVertex)
        .map(|v| emb.positions[v])
        .collect();
    let mut centers = Vec::new();
    let mut max_radius_error: f64 = 0.0;
    let mut strictly_convex = true;
    for (k, face) in diamond.primal_faces.iter().enumerate() {
        let c = emb.positions[diamond.center(k)];
        let pts: Vec<Vec2> = face.iter().map(|&v| emb.positions[v]).collect();
        for p in &pts {
            max_radius_error = max_radius_error.max(((p - c).norm() - 1.0).abs());
        }
        let n = pts.len();
        for i in 0..n {
            let e = pts[(i + 1) % n] - pts[i];
            if !(wedge(&e, &(c - pts[i])) > 1e-12) {
                strictly_convex = false;
            }
        }
        centers.push(c);
    }
    Ok(IsoradialView {
        vertices,
        centers,
        max_radius_error,
        strictly_convex,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::angles::is_strictly_order_preserving;
    use crate::generate;
    use rand::SeedableRng;
    use std::f64::consts::FRAC_PI_2;

    fn close(a: Vec2, b: Vec2) -> bool {
        (a - b).norm() < 1e-9
    }

    #[test]
    fn single_quad_is_a_unit_square() {
        let mesh = generate::grid(1, 1);
        let sys = TrackSystem::new(&mesh);
        let theta = boundary_chord_assignment(&mesh, &sys).unwrap();
        let d = (theta.angles()[1] - theta.angles()[0]).rem_euclid(TAU);
        assert!((d - FRAC_PI_2).abs() < 1e-12 || (d - 3.0 * FRAC_PI_2).abs() < 1e-12);
        let emb = build_embedding(&mesh, &sys, &theta).unwrap();
        let report = validate_embedding(&mesh, &sys, &emb);
        assert!(report.is_ok(), "{:?}", report.issues);
        let p = &emb.positions;
        assert!(close(p[0], Vec2::zeros()));
        // Vertex 3 is the corner opposite vertex 0.
        assert!(((p[3] - p[0]).norm() - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn grid_chords_are_distinct_and_valid() {
        let mesh = generate::grid(3, 2);
        let sys = TrackSystem::new(&mesh);
        let theta = boundary_chord_assignment(&mesh, &sys).unwrap();
        assert!(is_strictly_order_preserving(&theta, sys.digraph()));
        // Chord oracle: ends of parallel grid tracks sit symmetrically on
        // the circle, so their chords are parallel. Two directions remain,
        // perpendicular to each other.
        let mut a: Vec<f64> = theta.angles().iter().map(|x| x.rem_euclid(PI)).collect();
        a.sort_by(f64::total_cmp);
        a.dedup_by(|x, y| (*x - *y).abs() < 1e-9);
        assert_eq!(a.len(), 2);
        assert!(((a[1] - a[0]) - FRAC_PI_2).abs() < 1e-9);
        let emb = build_embedding(&mesh, &sys, &theta).unwrap();
        assert!(validate_embedding(&mesh, &sys, &emb).is_ok());
    }

    #[test]
    fn periodic_track_has_no_chords() {
        let mesh = generate::cube_minus_face();
        let sys = TrackSystem::new(&mesh);
        assert!(matches!(
            boundary_chord_assignment(&mesh, &sys),
            Err(Error::NotEmbeddable(_))
        ));
    }

    #[test]
    fn torus_grid_default() {
        let mesh = generate::torus_grid(2, 2);
        let sys = TrackSystem::new(&mesh);
        let theta = torus_default_assignment(&mesh, &sys).unwrap();
        let emb = build_embedding(&mesh, &sys, &theta).unwrap();
        let report = validate_embedding(&mesh, &sys, &emb);
        assert!(report.is_ok(), "{:?}", report.issues);
        let [p1, p2] = emb.periods.unwrap();
        assert!((p1.norm() - 2.0).abs() < 1e-12 && (p2.norm() - 2.0).abs() < 1e-12);
        assert!(p1.dot(&p2).abs() < 1e-12);
        assert!((emb.domain_area().unwrap() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn torus_default_angles() {
        let mesh = generate::torus_grid(2, 2);
        let sys = TrackSystem::new(&mesh);
        let classes = homology::homology_classes(&mesh, &sys).unwrap();
        let theta = torus_default_assignment(&mesh, &sys).unwrap();
        for (c, a) in classes.iter().zip(theta.angles()) {
            let expect = match (c.p, c.q) {
                (1, 0) => FRAC_PI_2,
                (-1, 0) => 3.0 * FRAC_PI_2,
                (0, 1) => PI,
                (0, -1) => 0.0,
                _ => unreachable!(),
            };
            assert!((a - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn spanning_trees_agree() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for mesh in [generate::grid(4, 3), generate::torus_grid(3, 2)] {
            let sys = TrackSystem::new(&mesh);
            let theta = if mesh.is_torus() {
                torus_default_assignment(&mesh, &sys).unwrap()
            } else {
                boundary_chord_assignment(&mesh, &sys).unwrap()
            };
            let a = build_embedding(&mesh, &sys, &theta).unwrap();
            for _ in 0..5 {
                let (root, parent) = random_track_tree(&mesh, &sys, &mut rng);
                let b = build_embedding_with_tree(&mesh, &sys, &theta, root, &parent).unwrap();
                for (x, y) in a.positions.iter().zip(&b.positions) {
                    assert!(close(*x, *y));
                }
            }
        }
    }

    #[test]
    fn perturbed_vertex_breaks_lengths() {
        let mesh = generate::grid(2, 2);
        let sys = TrackSystem::new(&mesh);
        let theta = boundary_chord_assignment(&mesh, &sys).unwrap();
        let mut emb = build_embedding(&mesh, &sys, &theta).unwrap();
        emb.positions[4].x += 0.1;
        let report = validate_embedding(&mesh, &sys, &emb);
        let bad: Vec<_> = report
            .issues
            .iter()
            .filter_map(|i| match i {
                EmbeddingIssue::EdgeLength { edge, .. } => Some(*edge),
                _ => None,
            })
            .collect();
        assert_eq!(bad.len(), 4);
        for h in bad {
            assert!(mesh.origin(h) == 4 || mesh.target(h) == 4);
        }
    }

    #[test]
    fn scaling() {
        let mesh = generate::grid(1, 1);
        let sys = TrackSystem::new(&mesh);
        let c = sys.face_crossing(0);
        let mut a = vec![0.0; 2];
        a[c.b.track] = FRAC_PI_2;
        let theta = TransversalAssignment::new(a);
        let emb = build_embedding(&mesh, &sys, &theta).unwrap();
        let mut f = vec![0.0; 2];
        f[c.a.track] = 2.0;
        f[c.b.track] = 3.0;
        let scaled = scale_tracks(&mesh, &sys, &emb, &f).unwrap();
        assert!((signed_area(&scaled.face_polygon(&mesh, 0)) - 6.0).abs() < 1e-12);
        assert!(validate_embedding(&mesh, &sys, &scaled).is_ok());
        let same = scale_tracks(&mesh, &sys, &emb, &[1.0, 1.0]).unwrap();
        assert_eq!(same.positions, emb.positions);
        assert!(matches!(
            scale_tracks(&mesh, &sys, &emb, &[1.0, 0.0]),
            Err(Error::NonPositiveFactor { track: 1, .. })
        ));
    }

    #[test]
    fn torus_rows_scaled() {
        let mesh = generate::torus_grid(2, 2);
        let sys = TrackSystem::new(&mesh);
        let theta = torus_default_assignment(&mesh, &sys).unwrap();
        let emb = build_embedding(&mesh, &sys, &theta).unwrap();
        let classes = homology::homology_classes(&mesh, &sys).unwrap();
        // Row tracks have class (±1, 0); their edges are the vertical ones.
        let f: Vec<f64> = classes.iter().map(|c| if c.q == 0 { 2.0 } else { 1.0 }).collect();
        let scaled = scale_tracks(&mesh, &sys, &emb, &f).unwrap();
        let [p1, p2] = scaled.periods.unwrap();
        let mut norms = [p1.norm(), p2.norm()];
        norms.sort_by(f64::total_cmp);
        assert!((norms[0] - 2.0).abs() < 1e-12 && (norms[1] - 4.0).abs() < 1e-12);
        assert!(validate_embedding(&mesh, &sys, &scaled).is_ok());
    }
}
