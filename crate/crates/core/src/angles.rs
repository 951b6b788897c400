//! Transversal angles, wedge angles and circle maps.
//!
//! An assignment stores one angle per track for its canonical orientation;
//! the reversed track sits at the antipode.

use std::collections::VecDeque;
use std::f64::consts::{PI, TAU};

use rand::Rng;
use serde::Serialize;

use crate::geometry::{angle_distance, normalize_angle, unit, Vec2};
use crate::mesh::{FaceId, QuadMesh};
use crate::tracks::{CrossingDigraph, OrientedTrack, TrackSystem};
use crate::{Error, Result};

/// Slack for strict interval membership.
pub const STRICT_EPS: f64 = 1e-12;
/// Tolerance for wedge-angle consistency.
pub const WEDGE_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TransversalAssignment {
    angles: Vec<f64>,
}

impl TransversalAssignment {
    /// Angles are reduced to `[0, 2π)`.
    pub fn new(angles: Vec<f64>) -> Self {
        TransversalAssignment {
            angles: angles.into_iter().map(normalize_angle).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn angle(&self, t: OrientedTrack) -> f64 {
        let a = self.angles[t.track];
        if t.positive {
            a
        } else {
            normalize_angle(a + PI)
        }
    }

    pub fn unit(&self, t: OrientedTrack) -> Vec2 {
        let u = unit(self.angles[t.track]);
        if t.positive {
            u
        } else {
            -u
        }
    }

    pub fn rotated(&self, c: f64) -> Self {
        Self::new(self.angles.iter().map(|a| a + c).collect())
    }

    /// Rotated so that track 0 sits at angle 0.
    pub fn pinned(&self) -> Self {
        match self.angles.first() {
            Some(&a) => self.rotated(-a),
            None => self.clone(),
        }
    }

    /// Largest angular deviation between two assignments after pinning
    /// both.
    pub fn distance_up_to_rotation(&self, other: &Self) -> f64 {
        let (a, b) = (self.pinned(), other.pinned());
        a.angles
            .iter()
            .zip(&b.angles)
            .map(|(x, y)| angle_distance(*x, *y))
            .fold(0.0, f64::max)
    }

    pub(crate) fn check_len(&self, tracks: usize) -> Result<()> {
        if self.angles.len() != tracks {
            return Err(Error::Length {
                what: "angle assignment",
                got: self.angles.len(),
                expected: tracks,
            });
        }
        Ok(())
    }
}

/// Counterclockwise angle from `θ(t)` to `θ(t')`, in `[0, 2π)`.
fn gap(theta: &TransversalAssignment, t: OrientedTrack, s: OrientedTrack) -> f64 {
    normalize_angle(theta.angle(s) - theta.angle(t))
}

/// First digraph edge violating the open half-circle condition.
pub fn strict_violation(
    theta: &TransversalAssignment,
    d: &CrossingDigraph,
) -> Option<(OrientedTrack, OrientedTrack)> {
    d.edges().iter().copied().find(|&(t, s)| {
        let g = gap(theta, t, s);
        !(g > STRICT_EPS && g < PI - STRICT_EPS)
    })
}

pub fn is_strictly_order_preserving(theta: &TransversalAssignment, d: &CrossingDigraph) -> bool {
    theta.len() == d.num_tracks() && strict_violation(theta, d).is_none()
}

/// Closed half-circle condition on every edge, and no directed cycle among
/// tracks that share an angle.
pub fn is_order_preserving(theta: &TransversalAssignment, d: &CrossingDigraph) -> bool {
    if theta.len() != d.num_tracks() {
        return false;
    }
    let closed = d.edges().iter().all(|&(t, s)| {
        let g = gap(theta, t, s);
        g <= PI + STRICT_EPS || g >= TAU - STRICT_EPS
    });
    closed && !same_angle_cycle(theta, d)
}

fn same_angle_cycle(theta: &TransversalAssignment, d: &CrossingDigraph) -> bool {
    let n = 2 * d.num_tracks();
    let same = |t: OrientedTrack, s: OrientedTrack| {
        angle_distance(theta.angle(t), theta.angle(s)) <= STRICT_EPS
    };
    let mut state = vec![0u8; n];
    for root in 0..n {
        if state[root] != 0 {
            continue;
        }
        let mut stack = vec![(root, d.successors(OrientedTrack::from_index(root)).collect::<Vec<_>>(), 0)];
        state[root] = 1;
        while let Some((v, succ, k)) = stack.last_mut() {
            if let Some(&w) = succ.get(*k) {
                *k += 1;
                if !same(OrientedTrack::from_index(*v), w) {
                    continue;
                }
                match state[w.index()] {
                    0 => {
                        state[w.index()] = 1;
                        let next = d.successors(w).collect();
                        stack.push((w.index(), next, 0));
                    }
                    1 => return true,
                    _ => {}
                }
            } else {
                state[*v] = 2;
                stack.pop();
            }
        }
    }
    false
}

/// Rhombus angle at every (face, corner) pair.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WedgeAngles {
    pub angles: Vec<[f64; 4]>,
}

impl WedgeAngles {
    pub fn get(&self, f: FaceId, corner: usize) -> f64 {
        self.angles[f][corner]
    }
}

fn edge_angle(system: &TrackSystem, theta: &TransversalAssignment, h: usize) -> f64 {
    let t = system.crossed_by(h).expect("face edge lies on a track");
    theta.angle(t)
}

/// Interior angle at each corner: from the outgoing edge counterclockwise
/// to the reversed incoming edge.
pub fn wedge_angles_from_assignment(
    mesh: &QuadMesh,
    system: &TrackSystem,
    theta: &TransversalAssignment,
) -> Result<WedgeAngles> {
    theta.check_len(system.len())?;
    if let Some((from, to)) = strict_violation(theta, system.digraph()) {
        return Err(Error::NotStrictlyOrderPreserving { from, to });
    }
    let angles = (0..mesh.num_faces())
        .map(|f| {
            let e = mesh.face_edges(f);
            let psi = e.map(|h| edge_angle(system, theta, h));
            std::array::from_fn(|i| normalize_angle(psi[(i + 3) % 4] + PI - psi[i]))
        })
        .collect();
    Ok(WedgeAngles { angles })
}

fn inconsistent(location: String, detail: String) -> Error {
    Error::InconsistentWedges { location, detail }
}

/// Recovers transversal angles from wedge angles, with track 0 at angle 0.
pub fn assignment_from_wedge_angles(
    mesh: &QuadMesh,
    system: &TrackSystem,
    wedges: &WedgeAngles,
) -> Result<TransversalAssignment> {
    if wedges.angles.len() != mesh.num_faces() {
        return Err(Error::Length {
            what: "wedge angle table",
            got: wedges.angles.len(),
            expected: mesh.num_faces(),
        });
    }
    for (f, a) in wedges.angles.iter().enumerate() {
        for i in 0..4 {
            if !(a[i] > 0.0 && a[i] < PI) {
                return Err(inconsistent(
                    format!("face {f}"),
                    format!("wedge angle {} at corner {i} outside (0, π)", a[i]),
                ));
            }
            let s = a[i] + a[(i + 1) % 4];
            if (s - PI).abs() > WEDGE_TOL {
                return Err(inconsistent(
                    format!("face {f}"),
                    format!("corners {i} and {} sum to {s}, expected π", (i + 1) % 4),
                ));
            }
        }
    }
    let boundary = mesh.boundary_vertices();
    let mut sums = vec![0.0; mesh.num_vertices()];
    for f in 0..mesh.num_faces() {
        for (i, v) in mesh.face_vertices(f).into_iter().enumerate() {
            sums[v] += wedges.angles[f][i];
        }
    }
    for (v, s) in sums.iter().enumerate() {
        if !boundary[v] && (s - TAU).abs() > WEDGE_TOL {
            return Err(inconsistent(
                format!("vertex {v}"),
                format!("angles sum to {s}, expected 2π"),
            ));
        }
    }

    let n = system.len();
    let mut theta: Vec<Option<f64>> = vec![None; n];
    if n == 0 {
        return Ok(TransversalAssignment::new(Vec::new()));
    }
    theta[0] = Some(0.0);
    let mut queue = VecDeque::from([0usize]);
    while let Some(t) = queue.pop_front() {
        for f in system.tracks()[t].faces() {
            let e = mesh.face_edges(f);
            let known = (0..4)
                .find(|&i| system.edge_track(e[i]).map(|x| x.0) == Some(t))
                .unwrap();
            let base = {
                let o = system.crossed_by(e[known]).unwrap();
                let a = theta[t].unwrap();
                if o.positive {
                    a
                } else {
                    a + PI
                }
            };
            let mut psi = [0.0; 4];
            psi[known] = base;
            for k in 1..4 {
                let i = (known + k) % 4;
                let prev = (i + 3) % 4;
                psi[i] = psi[prev] + PI - wedges.angles[f][i];
            }
            for i in 0..4 {
                let o = system.crossed_by(e[i]).unwrap();
                let value = normalize_angle(if o.positive { psi[i] } else { psi[i] - PI });
                match theta[o.track] {
                    None => {
                        theta[o.track] = Some(value);
                        queue.push_back(o.track);
                    }
                    Some(old) if angle_distance(old, value) > WEDGE_TOL => {
                        return Err(inconsistent(
                            format!("face {f}"),
                            format!("track {} receives angles {old} and {value}", o.track),
                        ));
                    }
                    _ => {}
                }
            }
        }
    }
    let angles = theta
        .iter()
        .enumerate()
        .map(|(t, a)| {
            a.ok_or_else(|| {
                inconsistent(
                    format!("track {t}"),
                    "not connected to track 0 through shared faces".into(),
                )
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TransversalAssignment::new(angles))
}

/// An orientation-preserving circle homeomorphism commuting with the
/// antipodal map, given by a breakpoint table of its lift over one period.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CircleMap {
    points: Vec<(f64, f64)>,
}

impl CircleMap {
    /// `points` are `(x, φ(x))` with `x` strictly increasing in `[0, 2π)`,
    /// `φ` strictly increasing with total rise below `2π`, and the table
    /// invariant under `(x, y) -> (x + π, y + π)`.
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        let bad = |m: String| Err(Error::InvalidCircleMap(m));
        let n = points.len();
        if n == 0 || n % 2 == 1 {
            return bad(format!("table needs an even, nonzero number of points, got {n}"));
        }
        for (k, w) in points.windows(2).enumerate() {
            if !(w[1].0 > w[0].0) {
                return bad(format!("breakpoints {k} and {} are not increasing in x", k + 1));
            }
            if !(w[1].1 > w[0].1) {
                return bad(format!("map is not increasing between breakpoints {k} and {}", k + 1));
            }
        }
        if !(points[0].0 >= 0.0 && points[n - 1].0 < TAU) {
            return bad("breakpoints must lie in [0, 2π)".into());
        }
        if !(points[n - 1].1 < points[0].1 + TAU) {
            return bad("lift rises by 2π or more over one period".into());
        }
        let h = n / 2;
        for k in 0..h {
            let (a, b) = (points[k], points[k + h]);
            if (b.0 - a.0 - PI).abs() > 1e-12 || (b.1 - a.1 - PI).abs() > 1e-12 {
                return bad(format!("breakpoint {k} has no antipodal partner"));
            }
        }
        Ok(CircleMap { points })
    }

    /// Builds the full table from breakpoints in `[0, π)`.
    pub fn from_half_period(half: &[(f64, f64)]) -> Result<Self> {
        let mut points = half.to_vec();
        points.extend(half.iter().map(|&(x, y)| (x + PI, y + PI)));
        Self::new(points)
    }

    pub fn identity() -> Self {
        Self::rotation(0.0)
    }

    pub fn rotation(c: f64) -> Self {
        CircleMap {
            points: vec![(0.0, c), (PI, c + PI)],
        }
    }

    /// Random map with `k` breakpoints per half period.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, k: usize) -> Self {
        loop {
            let mut xs: Vec<f64> = (0..k.max(1)).map(|_| rng.gen_range(0.0..PI)).collect();
            let mut ys: Vec<f64> = (0..k.max(1)).map(|_| rng.gen_range(0.0..PI)).collect();
            xs.sort_by(f64::total_cmp);
            ys.sort_by(f64::total_cmp);
            let shift = rng.gen_range(0.0..TAU);
            let half: Vec<_> = xs.into_iter().zip(ys.into_iter().map(|y| y + shift)).collect();
            if let Ok(m) = Self::from_half_period(&half) {
                return m;
            }
        }
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    /// Value of the lift at `x`, reduced to `[0, 2π)`.
    pub fn eval(&self, x: f64) -> f64 {
        let x = normalize_angle(x);
        let p = &self.points;
        let n = p.len();
        let k = p.partition_point(|q| q.0 <= x);
        let (a, b) = if k == 0 {
            ((p[n - 1].0 - TAU, p[n - 1].1 - TAU), p[0])
        } else if k == n {
            (p[n - 1], (p[0].0 + TAU, p[0].1 + TAU))
        } else {
            (p[k - 1], p[k])
        };
        let t = (x - a.0) / (b.0 - a.0);
        normalize_angle(a.1 + t * (b.1 - a.1))
    }

    pub fn apply(&self, theta: &TransversalAssignment) -> TransversalAssignment {
        TransversalAssignment::new(theta.angles().iter().map(|&a| self.eval(a)).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate;
    use crate::tracks::TrackSystem;
    use rand::SeedableRng;
    use std::f64::consts::FRAC_PI_2;

    fn z2() -> (TrackSystem, CrossingDigraph) {
        let mesh = generate::torus_grid(1, 1);
        let sys = TrackSystem::new(&mesh);
        let d = sys.digraph().clone();
        (sys, d)
    }

    /// Angles for (t_h, t_v) where t_h -> t_v in the digraph.
    fn pattern(d: &CrossingDigraph, h: f64, v: f64) -> TransversalAssignment {
        let (x, y) = d.edges()[0];
        // Express through the canonical orientations of x and y.
        let mut a = vec![0.0; 2];
        a[x.track] = if x.positive { h } else { h + PI };
        a[y.track] = if y.positive { v } else { v + PI };
        TransversalAssignment::new(a)
    }

    #[test]
    fn z2_strict_predicate() {
        let (_, d) = z2();
        assert!(is_strictly_order_preserving(&pattern(&d, 0.0, FRAC_PI_2), &d));
        assert!(!is_strictly_order_preserving(&pattern(&d, 0.0, 0.0), &d));
        assert!(!is_strictly_order_preserving(&pattern(&d, 0.0, 3.0 * FRAC_PI_2), &d));
    }

    #[test]
    fn z2_nonstrict_predicate() {
        let (_, d) = z2();
        assert!(is_order_preserving(&pattern(&d, 0.0, 0.0), &d));
        assert!(is_order_preserving(&pattern(&d, 0.0, FRAC_PI_2), &d));
        assert!(!is_order_preserving(&pattern(&d, 0.0, 3.0 * FRAC_PI_2), &d));
    }

    #[test]
    fn monochromatic_cycle_is_rejected() {
        let mesh = generate::three_rhombus_torus();
        let sys = TrackSystem::new(&mesh);
        // Put the three oriented tracks of a directed 3-cycle at one angle.
        let d = sys.digraph();
        let cyclic = (0..8u32).find_map(|m| {
            let o: Vec<OrientedTrack> = (0..3).map(|t| OrientedTrack::new(t, m >> t & 1 == 0)).collect();
            let cycle = (0..3).all(|k| d.has_edge(o[k], o[(k + 1) % 3]))
                || (0..3).all(|k| d.has_edge(o[(k + 1) % 3], o[k]));
            cycle.then_some(o)
        });
        let o = cyclic.expect("three pairwise crossing tracks form a directed cycle");
        let theta = TransversalAssignment::new(
            o.iter().map(|t| if t.positive { 0.0 } else { PI }).collect(),
        );
        assert!((0..3).all(|k| theta.angle(o[k]) == 0.0));
        assert!(!is_order_preserving(&theta, d));
    }

    #[test]
    fn square_wedges() {
        let mesh = generate::grid(3, 3);
        let sys = TrackSystem::new(&mesh);
        let theta = crate::embed::boundary_chord_assignment(&mesh, &sys).unwrap();
        let w = wedge_angles_from_assignment(&mesh, &sys, &theta).unwrap();
        let mut sums = vec![0.0; mesh.num_vertices()];
        for f in 0..mesh.num_faces() {
            for (i, v) in mesh.face_vertices(f).into_iter().enumerate() {
                sums[v] += w.get(f, i);
            }
        }
        let boundary = mesh.boundary_vertices();
        for v in 0..mesh.num_vertices() {
            if !boundary[v] {
                assert!((sums[v] - TAU).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn single_quad_wedges_alternate() {
        let mesh = generate::grid(1, 1);
        let sys = TrackSystem::new(&mesh);
        let c = sys.face_crossing(0);
        let mut a = vec![0.0; 2];
        a[c.a.track] = 0.0;
        a[c.b.track] = PI / 3.0;
        let w = wedge_angles_from_assignment(&mesh, &sys, &TransversalAssignment::new(a)).unwrap();
        let got = w.angles[0];
        let small = PI / 3.0;
        let big = 2.0 * PI / 3.0;
        assert!((got[0] - small).abs() < 1e-12 || (got[0] - big).abs() < 1e-12);
        for i in 0..4 {
            assert!((got[i] + got[(i + 1) % 4] - PI).abs() < 1e-12);
        }
        let all_right = WedgeAngles {
            angles: vec![[FRAC_PI_2; 4]],
        };
        let theta = assignment_from_wedge_angles(&mesh, &sys, &all_right).unwrap();
        let d = normalize_angle(theta.angles()[1] - theta.angles()[0]);
        assert!((angle_distance(d, FRAC_PI_2)).abs() < 1e-12 || (angle_distance(d, 3.0 * FRAC_PI_2)).abs() < 1e-12);
    }

    #[test]
    fn bad_vertex_sum_is_named() {
        let mesh = generate::grid(2, 2);
        let sys = TrackSystem::new(&mesh);
        let theta = crate::embed::boundary_chord_assignment(&mesh, &sys).unwrap();
        let mut w = wedge_angles_from_assignment(&mesh, &sys, &theta).unwrap();
        // The center vertex 4 is corner 2 of face 0; shift the whole face so
        // adjacent sums stay at π but the vertex total moves by 0.1.
        let e = 0.1;
        w.angles[0][2] += e;
        w.angles[0][0] += e;
        w.angles[0][1] -= e;
        w.angles[0][3] -= e;
        let err = assignment_from_wedge_angles(&mesh, &sys, &w).unwrap_err();
        assert!(err.to_string().contains("vertex 4"), "{err}");
    }

    #[test]
    fn round_trip_on_grid() {
        let mesh = generate::grid(3, 2);
        let sys = TrackSystem::new(&mesh);
        let theta = crate::embed::boundary_chord_assignment(&mesh, &sys).unwrap();
        let w = wedge_angles_from_assignment(&mesh, &sys, &theta).unwrap();
        let back = assignment_from_wedge_angles(&mesh, &sys, &w).unwrap();
        assert!(theta.distance_up_to_rotation(&back) < 1e-9);
    }

    #[test]
    fn circle_maps() {
        let theta = TransversalAssignment::new(vec![0.3, 1.0, 4.0]);
        assert_eq!(CircleMap::identity().apply(&theta), theta);
        let r = CircleMap::rotation(0.5).apply(&theta);
        for (a, b) in theta.angles().iter().zip(r.angles()) {
            assert!(angle_distance(a + 0.5, *b) < 1e-12);
        }
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let m = CircleMap::random(&mut rng, 4);
        for k in 0..100 {
            let x = k as f64 * 0.0628;
            assert!(angle_distance(m.eval(x + PI), m.eval(x) + PI) < 1e-9);
        }
    }

    #[test]
    fn invalid_circle_maps() {
        assert!(CircleMap::new(vec![(0.0, 1.0), (PI, 0.5)]).is_err());
        assert!(CircleMap::new(vec![(0.0, 0.0), (PI, 0.5 + PI)]).is_err());
        assert!(CircleMap::from_half_period(&[(0.0, 0.0), (1.0, 2.0)]).is_ok());
        assert!(CircleMap::from_half_period(&[(0.0, 0.0), (1.0, -1.0)]).is_err());
    }
}
