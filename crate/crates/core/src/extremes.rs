//! Extreme points of the space of embeddings.
//!
//! A sign per track is valid when the oriented tracks valued `+1` span an
//! acyclic subgraph of the crossing digraph, and so do those valued `-1`.
//! On a torus the labels are `+`, `-` or `0`; a `0` track contributes both
//! orientations to both subgraphs.

use std::collections::VecDeque;
use std::f64::consts::PI;

use serde::Serialize;

use crate::angles::{is_order_preserving, TransversalAssignment};
use crate::homology::HomologyClass;
use crate::mesh::{Offset, QuadMesh, VertexId};
use crate::tracks::{CrossingDigraph, OrientedTrack, TrackSystem};
use crate::{Error, Result, Surface};

/// Largest number of tracks the enumerations accept.
pub const TRACK_LIMIT: usize = 30;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct SignAssignment {
    /// Value of each canonically oriented track, `+1` or `-1`.
    pub signs: Vec<i8>,
}

impl SignAssignment {
    pub fn value(&self, t: OrientedTrack) -> i8 {
        let s = self.signs[t.track];
        if t.positive {
            s
        } else {
            -s
        }
    }

    pub fn negated(&self) -> Self {
        SignAssignment {
            signs: self.signs.iter().map(|s| -s).collect(),
        }
    }

    /// Whether both monochromatic subgraphs are acyclic.
    pub fn is_valid(&self, d: &CrossingDigraph) -> bool {
        let n = d.num_tracks();
        if self.signs.len() != n {
            return false;
        }
        let plus: Vec<bool> = (0..2 * n)
            .map(|i| self.value(OrientedTrack::from_index(i)) == 1)
            .collect();
        let minus: Vec<bool> = plus.iter().map(|p| !p).collect();
        !d.has_cycle_within(&plus) && !d.has_cycle_within(&minus)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Label {
    Plus,
    Minus,
    Zero,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct PeriodicLabel {
    pub labels: Vec<Label>,
}

impl PeriodicLabel {
    /// Members of the `{0, +}` subgraph, then of the `{0, -}` subgraph.
    fn members(&self) -> (Vec<bool>, Vec<bool>) {
        let n = self.labels.len();
        let mut zp = vec![false; 2 * n];
        let mut zm = vec![false; 2 * n];
        for (t, l) in self.labels.iter().enumerate() {
            let (p, m) = (OrientedTrack::new(t, true).index(), OrientedTrack::new(t, false).index());
            match l {
                Label::Plus => {
                    zp[p] = true;
                    zm[m] = true;
                }
                Label::Minus => {
                    zp[m] = true;
                    zm[p] = true;
                }
                Label::Zero => {
                    zp[p] = true;
                    zp[m] = true;
                    zm[p] = true;
                    zm[m] = true;
                }
            }
        }
        (zp, zm)
    }

    pub fn is_valid(&self, d: &CrossingDigraph) -> bool {
        if self.labels.len() != d.num_tracks() {
            return false;
        }
        let (zp, zm) = self.members();
        !d.has_cycle_within(&zp) && !d.has_cycle_within(&zm)
    }
}

fn guard(n: usize) -> Result<()> {
    if n > TRACK_LIMIT {
        return Err(Error::TooManyTracks {
            tracks: n,
            limit: TRACK_LIMIT,
        });
    }
    Ok(())
}

/// All valid sign assignments in lexicographic order with `+1` before `-1`.
pub fn enumerate_sign_extremes(d: &CrossingDigraph) -> Result<Vec<SignAssignment>> {
    let n = d.num_tracks();
    guard(n)?;
    let mut plus = vec![false; 2 * n];
    let mut minus = vec![false; 2 * n];
    let mut signs = vec![0i8; n];
    let mut out = Vec::new();
    sign_search(d, 0, &mut signs, &mut plus, &mut minus, &mut out);
    Ok(out)
}

fn sign_search(
    d: &CrossingDigraph,
    t: usize,
    signs: &mut Vec<i8>,
    plus: &mut [bool],
    minus: &mut [bool],
    out: &mut Vec<SignAssignment>,
) {
    if t == signs.len() {
        out.push(SignAssignment {
            signs: signs.clone(),
        });
        return;
    }
    for s in [1i8, -1] {
        let up = OrientedTrack::new(t, s == 1).index();
        let down = OrientedTrack::new(t, s != 1).index();
        plus[up] = true;
        minus[down] = true;
        if !d.reaches_itself(up, plus) && !d.reaches_itself(down, minus) {
            signs[t] = s;
            sign_search(d, t + 1, signs, plus, minus, out);
        }
        plus[up] = false;
        minus[down] = false;
    }
}

/// All valid `{+, -, 0}` labelings, ordered `+ < - < 0` per track.
pub fn enumerate_periodic_labels(d: &CrossingDigraph) -> Result<Vec<PeriodicLabel>> {
    let n = d.num_tracks();
    guard(n)?;
    let mut zp = vec![false; 2 * n];
    let mut zm = vec![false; 2 * n];
    let mut labels = vec![Label::Zero; n];
    let mut out = Vec::new();
    label_search(d, 0, &mut labels, &mut zp, &mut zm, &mut out);
    Ok(out)
}

fn label_search(
    d: &CrossingDigraph,
    t: usize,
    labels: &mut Vec<Label>,
    zp: &mut [bool],
    zm: &mut [bool],
    out: &mut Vec<PeriodicLabel>,
) {
    if t == labels.len() {
        out.push(PeriodicLabel {
            labels: labels.clone(),
        });
        return;
    }
    let p = OrientedTrack::new(t, true).index();
    let m = OrientedTrack::new(t, false).index();
    for l in [Label::Plus, Label::Minus, Label::Zero] {
        let (in_zp, in_zm): (Vec<usize>, Vec<usize>) = match l {
            Label::Plus => (vec![p], vec![m]),
            Label::Minus => (vec![m], vec![p]),
            Label::Zero => (vec![p, m], vec![p, m]),
        };
        for &i in &in_zp {
            zp[i] = true;
        }
        for &i in &in_zm {
            zm[i] = true;
        }
        let ok = in_zp.iter().all(|&i| !d.reaches_itself(i, zp))
            && in_zm.iter().all(|&i| !d.reaches_itself(i, zm));
        if ok {
            labels[t] = l;
            label_search(d, t + 1, labels, zp, zm, out);
        }
        for &i in &in_zp {
            zp[i] = false;
        }
        for &i in &in_zm {
            zm[i] = false;
        }
    }
}

/// `θ(t) = β` where `s(t) = +1` and `β + π` elsewhere.
pub fn extreme_to_boundary_assignment(s: &SignAssignment, beta: f64) -> TransversalAssignment {
    TransversalAssignment::new(
        s.signs
            .iter()
            .map(|&x| if x == 1 { beta } else { beta + PI })
            .collect(),
    )
}

/// As [`extreme_to_boundary_assignment`], but refuses signs whose
/// assignment is not order preserving.
pub fn checked_boundary_assignment(
    d: &CrossingDigraph,
    s: &SignAssignment,
    beta: f64,
) -> Result<TransversalAssignment> {
    let theta = extreme_to_boundary_assignment(s, beta);
    if !is_order_preserving(&theta, d) {
        return Err(Error::InvalidSigns(
            "a monochromatic subgraph has a directed cycle, so the assignment is not order preserving".into(),
        ));
    }
    Ok(theta)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HeightFunction {
    pub base: VertexId,
    pub heights: Vec<i64>,
}

/// Integer heights: crossing an edge of an oriented track valued `+1` from
/// its right to its left adds one, anything else subtracts one.
pub fn height_function(
    mesh: &QuadMesh,
    system: &TrackSystem,
    s: &SignAssignment,
    base: VertexId,
) -> Result<HeightFunction> {
    if mesh.is_torus() {
        return Err(Error::WrongSurface {
            expected: Surface::Planar,
        });
    }
    if s.signs.len() != system.len() {
        return Err(Error::Length {
            what: "sign assignment",
            got: s.signs.len(),
            expected: system.len(),
        });
    }
    if base >= mesh.num_vertices() {
        return Err(Error::InvalidSigns(format!("base vertex {base} out of range")));
    }
    let inc = |h: usize| -> Option<i64> { system.crossed_by(h).map(|t| i64::from(s.value(t))) };
    let out = mesh.outgoing();
    let mut heights: Vec<Option<i64>> = vec![None; mesh.num_vertices()];
    heights[base] = Some(0);
    let mut queue = VecDeque::from([base]);
    while let Some(v) = queue.pop_front() {
        let hv = heights[v].unwrap();
        for &h in &out[v] {
            let Some(d) = inc(h) else {
                return Err(Error::InvalidSigns(format!("edge {h} lies on no track")));
            };
            let w = mesh.target(h);
            match heights[w] {
                None => {
                    heights[w] = Some(hv + d);
                    queue.push_back(w);
                }
                Some(x) if x != hv + d => {
                    return Err(Error::InvalidSigns(format!(
                        "heights disagree across edge {h}"
                    )))
                }
                _ => {}
            }
        }
    }
    let heights = heights
        .into_iter()
        .enumerate()
        .map(|(v, x)| x.ok_or_else(|| Error::InvalidSigns(format!("vertex {v} is unreachable"))))
        .collect::<Result<Vec<_>>>()?;
    Ok(HeightFunction { base, heights })
}

/// A lift of a torus track to the universal cover: the track and the line
/// among its translates, keyed by `det(c, [t])` for deck copies `c`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LiftedTrack {
    pub track: usize,
    pub line: i64,
}

/// Crossing digraph of the lifts meeting a `size x size` block of
/// fundamental domains.
#[derive(Clone, Debug)]
pub struct LiftedBlock {
    pub lifts: Vec<LiftedTrack>,
    pub digraph: CrossingDigraph,
}

pub fn lift_block(
    mesh: &QuadMesh,
    system: &TrackSystem,
    classes: &[HomologyClass],
    size: i64,
) -> Result<LiftedBlock> {
    if !mesh.is_torus() {
        return Err(Error::WrongSurface {
            expected: Surface::Torus,
        });
    }
    // Deck copy of each corner in the frame of the face's first corner.
    let corner_copy = |f: usize| -> [Offset; 4] {
        let e = mesh.face_edges(f);
        let mut cc = [[0i64; 2]; 4];
        for i in 1..4 {
            let o = mesh.offset(e[i - 1]);
            cc[i] = [cc[i - 1][0] + o[0], cc[i - 1][1] + o[1]];
        }
        cc
    };
    // Frame shift of each (track, face) step relative to the track start.
    let mut shift_at: Vec<Vec<Option<Offset>>> = vec![vec![None; system.len()]; mesh.num_faces()];
    for t in system.tracks() {
        let mut s = [0i64; 2];
        for step in &t.steps {
            shift_at[step.face][t.id] = Some(s);
            let f = step.face;
            let i = mesh.face_edges(f).iter().position(|&h| h == step.exit).unwrap();
            let g_edge = mesh.twin(step.exit);
            let g = mesh.face_of(g_edge).unwrap();
            let j = mesh.face_edges(g).iter().position(|&h| h == g_edge).unwrap();
            let a = corner_copy(f)[(i + 1) % 4];
            let b = corner_copy(g)[j];
            s = [s[0] + a[0] - b[0], s[1] + a[1] - b[1]];
        }
    }
    let key = |t: usize, f: usize, c: Offset| -> i64 {
        let s = shift_at[f][t].expect("track passes through face");
        let d = [c[0] - s[0], c[1] - s[1]];
        d[0] * classes[t].q - d[1] * classes[t].p
    };
    let mut lifts = std::collections::BTreeMap::new();
    let mut crossings = Vec::new();
    let lift_id = |l: LiftedTrack, lifts: &mut std::collections::BTreeMap<LiftedTrack, usize>| {
        let n = lifts.len();
        *lifts.entry(l).or_insert(n)
    };
    for a in 0..size {
        for b in 0..size {
            for f in 0..mesh.num_faces() {
                let c = system.face_crossing(f);
                let la = LiftedTrack {
                    track: c.a.track,
                    line: key(c.a.track, f, [a, b]),
                };
                let lb = LiftedTrack {
                    track: c.b.track,
                    line: key(c.b.track, f, [a, b]),
                };
                let ia = lift_id(la, &mut lifts);
                let ib = lift_id(lb, &mut lifts);
                crossings.push((
                    OrientedTrack::new(ia, c.a.positive),
                    OrientedTrack::new(ib, c.b.positive),
                ));
            }
        }
    }
    let mut ordered = vec![LiftedTrack { track: 0, line: 0 }; lifts.len()];
    for (l, i) in &lifts {
        ordered[*i] = *l;
    }
    Ok(LiftedBlock {
        digraph: CrossingDigraph::from_crossings(ordered.len(), &crossings),
        lifts: ordered,
    })
}

/// Signs on the lifts induced by a periodic labeling; `zero` chooses the
/// sign of each lift of a `0` track.
pub fn lift_labels(
    label: &PeriodicLabel,
    block: &LiftedBlock,
    mut zero: impl FnMut(LiftedTrack) -> i8,
) -> SignAssignment {
    SignAssignment {
        signs: block
            .lifts
            .iter()
            .map(|&l| match label.labels[l.track] {
                Label::Plus => 1,
                Label::Minus => -1,
                Label::Zero => zero(l),
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate;
    use crate::homology::homology_classes;

    fn brute_force(d: &CrossingDigraph) -> Vec<SignAssignment> {
        let n = d.num_tracks();
        let mut out = Vec::new();
        for mask in 0..(1u32 << n) {
            // Bit t set means -1; counting upward gives +1 before -1 with
            // track 0 most significant once reversed.
            let signs: Vec<i8> = (0..n)
                .map(|t| if mask >> (n - 1 - t) & 1 == 1 { -1 } else { 1 })
                .collect();
            let s = SignAssignment { signs };
            if s.is_valid(d) {
                out.push(s);
            }
        }
        out
    }

    #[test]
    fn z2_signs_all_valid() {
        let mesh = generate::torus_grid(1, 1);
        let sys = TrackSystem::new(&mesh);
        let all = enumerate_sign_extremes(sys.digraph()).unwrap();
        assert_eq!(all.len(), 4);
        assert_eq!(all[0].signs, vec![1, 1]);
        assert_eq!(all[3].signs, vec![-1, -1]);
    }

    #[test]
    fn empty_digraph_gives_everything() {
        let d = CrossingDigraph::from_crossings(5, &[]);
        assert_eq!(enumerate_sign_extremes(&d).unwrap().len(), 32);
        assert_eq!(enumerate_periodic_labels(&d).unwrap().len(), 243);
    }

    #[test]
    fn grid_matches_brute_force() {
        let mesh = generate::grid(3, 2);
        let sys = TrackSystem::new(&mesh);
        let d = sys.digraph();
        assert_eq!(enumerate_sign_extremes(d).unwrap(), brute_force(d));
    }

    #[test]
    fn z2_periodic_labels() {
        let mesh = generate::torus_grid(1, 1);
        let sys = TrackSystem::new(&mesh);
        let labels = enumerate_periodic_labels(sys.digraph()).unwrap();
        assert_eq!(labels.len(), 8);
        assert!(!labels.iter().any(|l| l.labels == vec![Label::Zero, Label::Zero]));
        let zz = PeriodicLabel {
            labels: vec![Label::Zero, Label::Zero],
        };
        assert!(!zz.is_valid(sys.digraph()));
    }

    #[test]
    fn too_many_tracks() {
        let d = CrossingDigraph::from_crossings(31, &[]);
        assert!(matches!(
            enumerate_sign_extremes(&d),
            Err(Error::TooManyTracks { tracks: 31, limit: 30 })
        ));
    }

    #[test]
    fn grid_heights() {
        let mesh = generate::grid(2, 2);
        let sys = TrackSystem::new(&mesh);
        // Orient every track so that its transversal points right or up:
        // vertical edges 0 -> 3 and horizontal edges 0 -> 1 then rise.
        let mut signs = vec![0i8; sys.len()];
        for h in 0..mesh.num_half_edges() {
            let (a, b) = (mesh.origin(h), mesh.target(h));
            if b == a + 1 || b == a + 3 {
                let t = sys.crossed_by(h).unwrap();
                signs[t.track] = if t.positive { 1 } else { -1 };
            }
        }
        let s = SignAssignment { signs };
        let hf = height_function(&mesh, &sys, &s, 0).unwrap();
        for v in 0..9 {
            assert_eq!(hf.heights[v], (v % 3 + v / 3) as i64);
        }
        let neg = height_function(&mesh, &sys, &s.negated(), 0).unwrap();
        assert!(hf.heights.iter().zip(&neg.heights).all(|(a, b)| *a == -*b));
    }

    #[test]
    fn boundary_assignment_rotates() {
        let mesh = generate::torus_grid(1, 1);
        let sys = TrackSystem::new(&mesh);
        let s = SignAssignment { signs: vec![1, 1] };
        let a = extreme_to_boundary_assignment(&s, 0.0);
        assert!(is_order_preserving(&a, sys.digraph()));
        assert!(!crate::angles::is_strictly_order_preserving(&a, sys.digraph()));
        let b = extreme_to_boundary_assignment(&s, 0.7);
        assert!(a.distance_up_to_rotation(&b) < 1e-12);
    }

    #[test]
    fn invalid_lifted_signs_fail_the_predicate() {
        let mesh = generate::three_rhombus_torus();
        let sys = TrackSystem::new(&mesh);
        let d = sys.digraph();
        let classes = homology_classes(&mesh, &sys).unwrap();
        let block = lift_block(&mesh, &sys, &classes, 3).unwrap();
        // Signs whose plus part contains a directed 3-cycle of the quotient.
        let bad: Vec<SignAssignment> = (0..8u32)
            .map(|m| SignAssignment {
                signs: (0..3).map(|t| if m >> t & 1 == 0 { 1 } else { -1 }).collect(),
            })
            .filter(|s| !s.is_valid(d))
            .collect();
        assert_eq!(bad.len(), 2);
        for s in &bad {
            assert!(!is_order_preserving(&extreme_to_boundary_assignment(s, 0.0), d));
            assert!(checked_boundary_assignment(d, s, 0.0).is_err());
            // The same signs on every lift stay cyclic in the universal cover.
            let lifted = SignAssignment {
                signs: block.lifts.iter().map(|l| s.signs[l.track]).collect(),
            };
            assert!(!lifted.is_valid(&block.digraph));
        }
    }
}
