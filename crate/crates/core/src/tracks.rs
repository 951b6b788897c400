//! Train tracks, the crossing digraph and the embeddability tests.
//!
//! A track enters a face through one edge and leaves through the opposite
//! one. Each track gets a canonical orientation: the one in which its
//! smallest directed edge id is an entry edge. A directed edge `h` crossed
//! by canonical track `t` *points left* when it runs from the right of `t`
//! to its left, which is the case exactly when `h` is an exit edge of some
//! step of `t`. Its displacement in an embedding is then `+u(θ_t)`.
//!
//! In a face `(e0, e1, e2, e3)` let `A` be the oriented track entering at
//! `e0` and `B` the one entering at `e1`. Then `B` crosses `A` from right to
//! left, and the digraph receives `A -> B`, `B -> -A`, `-A -> -B`, `-B -> A`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_integer::Integer;
use serde::Serialize;

use crate::homology::{self, HomologyClass};
use crate::mesh::{EdgeId, FaceId, QuadMesh};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Step {
    pub face: FaceId,
    pub entry: EdgeId,
    pub exit: EdgeId,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TrainTrack {
    pub id: usize,
    pub steps: Vec<Step>,
    /// Closed tracks are periodic on a planar mesh.
    pub closed: bool,
}

impl TrainTrack {
    pub fn faces(&self) -> impl Iterator<Item = FaceId> + '_ {
        self.steps.iter().map(|s| s.face)
    }

    /// Outer directed edges where an open track starts and ends.
    pub fn ends(&self, mesh: &QuadMesh) -> Option<(EdgeId, EdgeId)> {
        if self.closed {
            return None;
        }
        let first = self.steps.first()?;
        let last = self.steps.last()?;
        Some((mesh.twin(first.entry), mesh.twin(last.exit)))
    }
}

/// A train track with a direction; `positive` is the canonical one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OrientedTrack {
    pub track: usize,
    pub positive: bool,
}

impl OrientedTrack {
    pub fn new(track: usize, positive: bool) -> Self {
        OrientedTrack { track, positive }
    }

    pub fn pos(track: usize) -> Self {
        Self::new(track, true)
    }

    /// Dense index: `2 * track` for the canonical direction, `+1` for the
    /// reverse.
    pub fn index(self) -> usize {
        2 * self.track + usize::from(!self.positive)
    }

    pub fn from_index(i: usize) -> Self {
        Self::new(i / 2, i.is_multiple_of(2))
    }

    pub fn sign(self) -> i64 {
        if self.positive {
            1
        } else {
            -1
        }
    }
}

impl std::ops::Neg for OrientedTrack {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(self.track, !self.positive)
    }
}

impl fmt::Display for OrientedTrack {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = if self.positive { '+' } else { '-' };
        write!(f, "{s}{}", self.track)
    }
}

impl Serialize for OrientedTrack {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Per-face crossing data.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FaceCrossing {
    /// Enters through corner edge 0.
    pub a: OrientedTrack,
    /// Enters through corner edge 1; crosses `a` from right to left.
    pub b: OrientedTrack,
}

/// Directed graph of positive intersections plus the signed intersection
/// matrix `b`, where `b[i][j]` counts crossings of track `j` over track `i`
/// from right to left, minus those from left to right.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CrossingDigraph {
    num_tracks: usize,
    edges: Vec<(OrientedTrack, OrientedTrack)>,
    succ: Vec<Vec<usize>>,
    b: Vec<Vec<i64>>,
}

impl CrossingDigraph {
    /// Builds the digraph from a list of positive intersections `a -> b`
    /// (each generating its 4-cycle). Self pairs are kept as loops.
    pub fn from_crossings(num_tracks: usize, crossings: &[(OrientedTrack, OrientedTrack)]) -> Self {
        let mut set = BTreeSet::new();
        let mut b = vec![vec![0i64; num_tracks]; num_tracks];
        for &(x, y) in crossings {
            set.insert((x, y));
            set.insert((y, -x));
            set.insert((-x, -y));
            set.insert((-y, x));
            if x.track != y.track {
                let s = x.sign() * y.sign();
                b[x.track][y.track] += s;
                b[y.track][x.track] -= s;
            }
        }
        let edges: Vec<_> = set.into_iter().collect();
        let mut succ = vec![Vec::new(); 2 * num_tracks];
        for &(x, y) in &edges {
            succ[x.index()].push(y.index());
        }
        CrossingDigraph {
            num_tracks,
            edges,
            succ,
            b,
        }
    }

    pub fn num_tracks(&self) -> usize {
        self.num_tracks
    }

    /// Edges sorted by (source, target).
    pub fn edges(&self) -> &[(OrientedTrack, OrientedTrack)] {
        &self.edges
    }

    pub fn successors(&self, t: OrientedTrack) -> impl Iterator<Item = OrientedTrack> + '_ {
        self.succ[t.index()].iter().map(|&i| OrientedTrack::from_index(i))
    }

    pub fn has_edge(&self, from: OrientedTrack, to: OrientedTrack) -> bool {
        self.succ[from.index()].contains(&to.index())
    }

    pub fn b(&self) -> &[Vec<i64>] {
        &self.b
    }

    /// True when the subgraph induced on `members` (indexed by
    /// [`OrientedTrack::index`]) has a directed cycle.
    pub fn has_cycle_within(&self, members: &[bool]) -> bool {
        // 0 = unvisited, 1 = on stack, 2 = done
        let mut state = vec![0u8; members.len()];
        for root in 0..members.len() {
            if !members[root] || state[root] != 0 {
                continue;
            }
            let mut stack = vec![(root, 0usize)];
            state[root] = 1;
            while let Some(&mut (v, ref mut k)) = stack.last_mut() {
                if let Some(&w) = self.succ[v].get(*k) {
                    *k += 1;
                    if !members[w] {
                        continue;
                    }
                    match state[w] {
                        0 => {
                            state[w] = 1;
                            stack.push((w, 0));
                        }
                        1 => return true,
                        _ => {}
                    }
                } else {
                    state[v] = 2;
                    stack.pop();
                }
            }
        }
        false
    }

    /// Whether a directed cycle through `start` exists inside `members`.
    pub fn reaches_itself(&self, start: usize, members: &[bool]) -> bool {
        let mut seen = vec![false; members.len()];
        let mut stack = vec![start];
        while let Some(v) = stack.pop() {
            for &w in &self.succ[v] {
                if w == start {
                    return true;
                }
                if members[w] && !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        false
    }
}

/// All train tracks of a mesh with per-edge and per-face lookups.
#[derive(Clone, Debug)]
pub struct TrackSystem {
    tracks: Vec<TrainTrack>,
    edge_track: Vec<Option<(usize, bool)>>,
    face_crossings: Vec<FaceCrossing>,
    digraph: CrossingDigraph,
}

impl TrackSystem {
    pub fn new(mesh: &QuadMesh) -> Self {
        let nf = mesh.num_faces();
        let mut used = vec![[false; 2]; nf];
        let mut walks: Vec<(Vec<Step>, bool)> = Vec::new();

        let corner = |h: EdgeId| -> usize {
            let f = mesh.face_of(h).expect("interior edge");
            mesh.face_edges(f).iter().position(|&g| g == h).unwrap()
        };
        let step_from = |entry: EdgeId| -> Step {
            let f = mesh.face_of(entry).unwrap();
            let edges = mesh.face_edges(f);
            let exit = edges[(corner(entry) + 2) % 4];
            Step { face: f, entry, exit }
        };

        // Open tracks start at the outer walk.
        for o in 0..mesh.num_half_edges() {
            if !mesh.is_outer(o) {
                continue;
            }
            let first = mesh.twin(o);
            // Pendant edges (both sides outer) carry no track.
            if mesh.is_outer(first) || used[mesh.face_of(first).unwrap()][corner(first) % 2] {
                continue;
            }
            let mut steps = Vec::new();
            let mut entry = first;
            loop {
                let s = step_from(entry);
                used[s.face][corner(entry) % 2] = true;
                steps.push(s);
                let t = mesh.twin(s.exit);
                if mesh.is_outer(t) {
                    break;
                }
                entry = t;
            }
            walks.push((steps, false));
        }
        // Everything else is closed.
        for f in 0..nf {
            for pair in 0..2 {
                if used[f][pair] {
                    continue;
                }
                let first = mesh.face_edges(f)[pair];
                let mut steps = Vec::new();
                let mut entry = first;
                loop {
                    let s = step_from(entry);
                    used[s.face][corner(entry) % 2] = true;
                    steps.push(s);
                    entry = mesh.twin(s.exit);
                    if entry == first || steps.len() > 2 * nf {
                        break;
                    }
                }
                walks.push((steps, true));
            }
        }

        // Orient canonically and sort by smallest edge id.
        let mut keyed: Vec<(EdgeId, Vec<Step>, bool)> = walks
            .into_iter()
            .map(|(steps, closed)| {
                let min = steps
                    .iter()
                    .flat_map(|s| [s.entry, s.exit, mesh.twin(s.entry), mesh.twin(s.exit)])
                    .min()
                    .unwrap();
                let steps = orient(steps, closed, min);
                (min, steps, closed)
            })
            .collect();
        keyed.sort_by_key(|k| k.0);

        let mut edge_track = vec![None; mesh.num_half_edges()];
        let mut tracks = Vec::with_capacity(keyed.len());
        for (id, (_, steps, closed)) in keyed.into_iter().enumerate() {
            for s in &steps {
                edge_track[s.entry] = Some((id, false));
                edge_track[mesh.twin(s.entry)] = Some((id, true));
                edge_track[s.exit] = Some((id, true));
                edge_track[mesh.twin(s.exit)] = Some((id, false));
            }
            tracks.push(TrainTrack { id, steps, closed });
        }

        let mut face_crossings = Vec::with_capacity(nf);
        for f in 0..nf {
            let e = mesh.face_edges(f);
            let (ta, sa) = edge_track[e[0]].unwrap();
            let (tb, sb) = edge_track[e[1]].unwrap();
            // An entry edge points right (`false`), so the canonical track
            // enters at e0 exactly when e0 is not left-pointing.
            face_crossings.push(FaceCrossing {
                a: OrientedTrack::new(ta, !sa),
                b: OrientedTrack::new(tb, !sb),
            });
        }
        let pairs: Vec<_> = face_crossings.iter().map(|c| (c.a, c.b)).collect();
        let digraph = CrossingDigraph::from_crossings(tracks.len(), &pairs);
        TrackSystem {
            tracks,
            edge_track,
            face_crossings,
            digraph,
        }
    }

    pub fn tracks(&self) -> &[TrainTrack] {
        &self.tracks
    }

    pub fn len(&self) -> usize {
        self.tracks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tracks.is_empty()
    }

    /// Track crossing `h`, and whether `h` points from its right to its
    /// left. `None` for edges on no face.
    pub fn edge_track(&self, h: EdgeId) -> Option<(usize, bool)> {
        self.edge_track.get(h).copied().flatten()
    }

    /// The oriented track that `h` crosses from right to left.
    pub fn crossed_by(&self, h: EdgeId) -> Option<OrientedTrack> {
        self.edge_track(h).map(|(t, left)| OrientedTrack::new(t, left))
    }

    pub fn face_crossing(&self, f: FaceId) -> FaceCrossing {
        self.face_crossings[f]
    }

    pub fn face_crossings(&self) -> &[FaceCrossing] {
        &self.face_crossings
    }

    pub fn digraph(&self) -> &CrossingDigraph {
        &self.digraph
    }

    /// Shared faces per unordered pair of distinct tracks.
    pub fn shared_faces(&self) -> BTreeMap<(usize, usize), Vec<FaceId>> {
        let mut map: BTreeMap<(usize, usize), Vec<FaceId>> = BTreeMap::new();
        for (f, c) in self.face_crossings.iter().enumerate() {
            let (i, j) = (c.a.track, c.b.track);
            if i != j {
                map.entry((i.min(j), i.max(j))).or_default().push(f);
            }
        }
        map
    }
}

fn orient(mut steps: Vec<Step>, closed: bool, min: EdgeId) -> Vec<Step> {
    // Interior ids precede outer ones, so `min` is the entry or exit of a
    // step; in the second case the walk runs backwards.
    let forward = steps.iter().any(|s| s.entry == min);
    if !forward {
        steps.reverse();
        for s in &mut steps {
            std::mem::swap(&mut s.entry, &mut s.exit);
        }
    }
    if closed {
        if let Some(k) = steps.iter().position(|s| s.entry == min) {
            steps.rotate_left(k);
        }
    }
    steps
}

/// A reason why a mesh has no rhombic embedding.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    PeriodicTrack {
        track: usize,
        faces: Vec<FaceId>,
    },
    SelfCrossing {
        track: usize,
        face: FaceId,
    },
    TracksCrossTwice {
        tracks: [usize; 2],
        faces: Vec<FaceId>,
    },
    OpenTrack {
        track: usize,
    },
    NullHomologous {
        track: usize,
    },
    NonPrimitive {
        track: usize,
        class: HomologyClass,
    },
    IntersectionCount {
        tracks: [usize; 2],
        shared: usize,
        expected: usize,
    },
    Homology {
        message: String,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::PeriodicTrack { track, faces } => {
                write!(f, "periodic track {track} (faces {})", list(faces))
            }
            Violation::SelfCrossing { track, face } => {
                write!(f, "track {track} crosses itself at face {face}")
            }
            Violation::TracksCrossTwice { tracks, faces } => write!(
                f,
                "tracks cross twice: {} and {} share faces {}",
                tracks[0],
                tracks[1],
                list(faces)
            ),
            Violation::OpenTrack { track } => write!(f, "track {track} is not closed"),
            Violation::NullHomologous { track } => {
                write!(f, "null-homologous track {track}")
            }
            Violation::NonPrimitive { track, class } => {
                write!(f, "track {track} has non-primitive class {class}")
            }
            Violation::IntersectionCount {
                tracks,
                shared,
                expected,
            } => {
                let rel = if shared > expected { "excess" } else { "missing" };
                let op = if shared > expected { '>' } else { '<' };
                write!(
                    f,
                    "{rel} intersections: {shared} {op} {expected} (tracks {} and {})",
                    tracks[0], tracks[1]
                )
            }
            Violation::Homology { message } => write!(f, "homology: {message}"),
        }
    }
}

fn list(items: &[usize]) -> String {
    let parts: Vec<String> = items.iter().map(ToString::to_string).collect();
    format!("[{}]", parts.join(", "))
}

fn self_crossings(system: &TrackSystem) -> Vec<Violation> {
    system
        .face_crossings()
        .iter()
        .enumerate()
        .filter(|(_, c)| c.a.track == c.b.track)
        .map(|(face, c)| Violation::SelfCrossing {
            track: c.a.track,
            face,
        })
        .collect()
}

/// Violations of the planar embeddability criterion: no track crosses
/// itself or is periodic, and two tracks share at most one face.
pub fn check_embeddable_finite(_mesh: &QuadMesh, system: &TrackSystem) -> Vec<Violation> {
    let mut out = Vec::new();
    for t in system.tracks() {
        if t.closed {
            out.push(Violation::PeriodicTrack {
                track: t.id,
                faces: t.faces().collect(),
            });
        }
    }
    out.extend(self_crossings(system));
    for ((i, j), faces) in system.shared_faces() {
        if faces.len() > 1 {
            out.push(Violation::TracksCrossTwice {
                tracks: [i, j],
                faces,
            });
        }
    }
    out
}

/// Violations of the torus criterion: every track is a closed curve that
/// visits each face once, has a primitive nonzero class, and meets every
/// other track exactly `|p_i q_j - p_j q_i|` times.
pub fn check_embeddable_torus(mesh: &QuadMesh, system: &TrackSystem) -> Vec<Violation> {
    let mut out = Vec::new();
    for t in system.tracks() {
        if !t.closed {
            out.push(Violation::OpenTrack { track: t.id });
        }
    }
    out.extend(self_crossings(system));
    let classes = match homology::homology_classes(mesh, system) {
        Ok(c) => c,
        Err(e) => {
            out.push(Violation::Homology {
                message: e.to_string(),
            });
            return out;
        }
    };
    for (t, c) in classes.iter().enumerate() {
        if c.is_zero() {
            out.push(Violation::NullHomologous { track: t });
        } else if c.p.gcd(&c.q) != 1 {
            out.push(Violation::NonPrimitive {
                track: t,
                class: *c,
            });
        }
    }
    let shared = system.shared_faces();
    for i in 0..classes.len() {
        for j in i + 1..classes.len() {
            let expected = classes[i].wedge(classes[j]).unsigned_abs() as usize;
            let got = shared.get(&(i, j)).map_or(0, Vec::len);
            if got != expected {
                out.push(Violation::IntersectionCount {
                    tracks: [i, j],
                    shared: got,
                    expected,
                });
            }
        }
    }
    out
}

/// Dispatches on the surface type.
pub fn check_embeddable(mesh: &QuadMesh, system: &TrackSystem) -> Vec<Violation> {
    if mesh.is_torus() {
        check_embeddable_torus(mesh, system)
    } else {
        check_embeddable_finite(mesh, system)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate;

    #[test]
    fn grid_tracks() {
        let mesh = generate::grid(3, 2);
        let sys = TrackSystem::new(&mesh);
        assert_eq!(sys.len(), 5);
        let mut lens: Vec<usize> = sys.tracks().iter().map(|t| t.steps.len()).collect();
        lens.sort();
        assert_eq!(lens, vec![2, 2, 2, 3, 3]);
        assert!(sys.tracks().iter().all(|t| !t.closed));
        assert!(check_embeddable_finite(&mesh, &sys).is_empty());
    }

    #[test]
    fn steps_are_linked_and_edges_partitioned() {
        let mesh = generate::grid(4, 3);
        let sys = TrackSystem::new(&mesh);
        let mut count = vec![0; mesh.num_faces()];
        for t in sys.tracks() {
            for w in t.steps.windows(2) {
                assert_eq!(mesh.twin(w[0].exit), w[1].entry);
            }
            for s in &t.steps {
                count[s.face] += 1;
            }
        }
        assert!(count.iter().all(|&c| c == 2));
        for h in 0..mesh.num_half_edges() {
            assert!(sys.edge_track(h).is_some());
        }
    }

    #[test]
    fn canonical_orientation_enters_at_smallest_edge() {
        let mesh = generate::grid(3, 2);
        let sys = TrackSystem::new(&mesh);
        let mut prev_min = None;
        for t in sys.tracks() {
            let min = t
                .steps
                .iter()
                .flat_map(|s| [s.entry, s.exit, mesh.twin(s.entry), mesh.twin(s.exit)])
                .min()
                .unwrap();
            assert!(t.steps.iter().any(|s| s.entry == min));
            assert!(prev_min < Some(min));
            prev_min = Some(min);
        }
    }

    #[test]
    fn single_quad_has_one_crossing() {
        let mesh = generate::grid(1, 1);
        let sys = TrackSystem::new(&mesh);
        assert_eq!(sys.len(), 2);
        let c = sys.face_crossing(0);
        assert!(c.a.positive && c.b.positive);
        assert_eq!(sys.digraph().edges().len(), 4);
        assert_eq!(sys.digraph().b()[c.a.track][c.b.track], 1);
        assert!(check_embeddable_finite(&mesh, &sys).is_empty());
    }

    #[test]
    fn cube_minus_face_is_rejected() {
        let mesh = generate::cube_minus_face();
        let sys = TrackSystem::new(&mesh);
        assert_eq!(sys.len(), 3);
        assert_eq!(sys.tracks().iter().filter(|t| t.closed).count(), 1);
        let v = check_embeddable_finite(&mesh, &sys);
        let text: Vec<String> = v.iter().map(ToString::to_string).collect();
        assert!(text.iter().any(|s| s.starts_with("periodic track")));
        assert!(text.iter().any(|s| s.starts_with("tracks cross twice")));
    }

    #[test]
    fn four_cycle_pattern() {
        let mesh = generate::torus_grid(1, 1);
        let sys = TrackSystem::new(&mesh);
        let d = sys.digraph();
        assert_eq!(d.edges().len(), 4);
        for &(x, y) in d.edges() {
            assert!(d.has_edge(y, -x));
        }
        let all = vec![true; 4];
        assert!(d.has_cycle_within(&all));
    }

    #[test]
    fn torus_grid_is_embeddable() {
        let mesh = generate::torus_grid(2, 2);
        let sys = TrackSystem::new(&mesh);
        assert_eq!(sys.len(), 4);
        assert!(sys.tracks().iter().all(|t| t.closed));
        assert!(check_embeddable_torus(&mesh, &sys).is_empty());
        let b = sys.digraph().b();
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(b[i][j], -b[j][i]);
            }
        }
    }

    #[test]
    fn disjoint_tracks_have_no_edge() {
        let mesh = generate::torus_grid(2, 2);
        let sys = TrackSystem::new(&mesh);
        let shared = sys.shared_faces();
        for i in 0..4 {
            for j in i + 1..4 {
                if !shared.contains_key(&(i, j)) {
                    for x in [true, false] {
                        for y in [true, false] {
                            let (a, b) = (OrientedTrack::new(i, x), OrientedTrack::new(j, y));
                            assert!(!sys.digraph().has_edge(a, b));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn oriented_track_negation() {
        let t = OrientedTrack::new(3, true);
        assert_eq!(-(-t), t);
        assert_eq!(t.to_string(), "+3");
        assert_eq!((-t).to_string(), "-3");
        assert_eq!(OrientedTrack::from_index((-t).index()), -t);
    }
}
