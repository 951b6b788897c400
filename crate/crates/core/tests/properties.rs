//! Randomized invariants. Meshes are drawn from a proptest-chosen seed so
//! failures shrink to a single reproducible seed.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rhombic::angles::{
    assignment_from_wedge_angles, is_order_preserving, is_strictly_order_preserving,
    wedge_angles_from_assignment, CircleMap,
};
use rhombic::embed::{
    boundary_chord_assignment, build_embedding, build_embedding_with_tree, random_track_tree,
    torus_default_assignment, validate_embedding,
};
use rhombic::extremes::{enumerate_periodic_labels, lift_block, lift_labels};
use rhombic::homology::homology_classes;
use rhombic::optimize::{maximize_area, AreaContext, OptimizeOptions};
use rhombic::tracks::{check_embeddable, check_embeddable_finite};
use rhombic::{
    diamond_graph, generate, parse_mesh, serialize_mesh, validate_mesh, PlanarMap, QuadMesh,
    TrackSystem, TransversalAssignment, VertexTag,
};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn finite_mesh(r: &mut ChaCha8Rng) -> QuadMesh {
    let wires = r.gen_range(2..=9);
    generate::random_wiring_mesh(r, wires, 36)
}

fn any_mesh(r: &mut ChaCha8Rng) -> QuadMesh {
    if r.gen_bool(0.5) {
        finite_mesh(r)
    } else {
        generate::random_torus_lines(r, 5)
    }
}

/// Strictly order-preserving start: the canonical one for the surface,
/// scrambled by a random circle map.
fn strict_theta(r: &mut ChaCha8Rng, mesh: &QuadMesh, sys: &TrackSystem) -> TransversalAssignment {
    let base = if mesh.is_torus() {
        torus_default_assignment(mesh, sys).unwrap()
    } else {
        boundary_chord_assignment(mesh, sys).unwrap()
    };
    let k = r.gen_range(1..5);
    CircleMap::random(r, k).apply(&base)
}

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(config(128))]

    #[test]
    fn face_cycles_partition_directed_edges(seed in any::<u64>()) {
        let mesh = any_mesh(&mut rng(seed));
        prop_assert!(validate_mesh(&mesh).is_empty());
        let mut seen = vec![0; mesh.num_half_edges()];
        for f in 0..mesh.num_faces() {
            let e = mesh.face_edges(f);
            for i in 0..4 {
                seen[e[i]] += 1;
                prop_assert_eq!(mesh.next(e[i]), e[(i + 1) % 4]);
            }
        }
        for h in 0..mesh.num_half_edges() {
            prop_assert_eq!(seen[h], usize::from(mesh.face_of(h).is_some()));
        }
    }

    #[test]
    fn serialization_round_trips(seed in any::<u64>()) {
        let mesh = any_mesh(&mut rng(seed));
        let back = parse_mesh(&serialize_mesh(&mesh)).unwrap();
        prop_assert_eq!(back, mesh);
    }

    #[test]
    fn diamond_graphs_are_valid_and_bipartite(seed in any::<u64>()) {
        let mesh = finite_mesh(&mut rng(seed));
        let faces: Vec<Vec<usize>> = (0..mesh.num_faces()).map(|f| mesh.face_vertices(f).to_vec()).collect();
        let map = PlanarMap::from_faces(mesh.num_vertices(), &faces).unwrap();
        let d = diamond_graph(&map).unwrap();
        prop_assert!(validate_mesh(&d.mesh).is_empty());
        for h in 0..d.mesh.num_half_edges() {
            prop_assert_ne!(d.tags[d.mesh.origin(h)], d.tags[d.mesh.target(h)]);
        }
        let centers = d.tags.iter().filter(|&&t| t == VertexTag::PrimalFace).count();
        prop_assert_eq!(centers, mesh.num_faces());
    }

    #[test]
    fn every_face_lies_on_two_tracks(seed in any::<u64>()) {
        let mesh = any_mesh(&mut rng(seed));
        let sys = TrackSystem::new(&mesh);
        let mut count = vec![0; mesh.num_faces()];
        for t in sys.tracks() {
            for f in t.faces() {
                count[f] += 1;
            }
        }
        prop_assert!(count.iter().all(|&c| c == 2));
    }

    #[test]
    fn crossing_digraph_has_the_four_cycle_symmetry(seed in any::<u64>()) {
        let mesh = any_mesh(&mut rng(seed));
        let sys = TrackSystem::new(&mesh);
        let d = sys.digraph();
        for &(t, s) in d.edges() {
            prop_assert!(d.has_edge(s, -t));
            prop_assert!(d.has_edge(-s, t));
        }
    }

    #[test]
    fn torus_crossings_match_homology(seed in any::<u64>()) {
        let mesh = generate::random_torus_lines(&mut rng(seed), 5);
        let sys = TrackSystem::new(&mesh);
        prop_assert!(check_embeddable(&mesh, &sys).is_empty());
        let classes = homology_classes(&mesh, &sys).unwrap();
        let shared: BTreeMap<(usize, usize), Vec<usize>> = sys.shared_faces();
        let b = sys.digraph().b();
        for i in 0..sys.len() {
            for j in 0..sys.len() {
                prop_assert_eq!(b[i][j], classes[i].wedge(classes[j]));
                if i < j {
                    let n = shared.get(&(i, j)).map_or(0, Vec::len);
                    prop_assert_eq!(n as i64, b[i][j].abs());
                }
            }
        }
    }

    #[test]
    fn admissible_finite_meshes_embed(seed in any::<u64>()) {
        let mesh = finite_mesh(&mut rng(seed));
        let sys = TrackSystem::new(&mesh);
        prop_assert!(check_embeddable_finite(&mesh, &sys).is_empty());
        let theta = boundary_chord_assignment(&mesh, &sys).unwrap();
        let emb = build_embedding(&mesh, &sys, &theta).unwrap();
        prop_assert!(validate_embedding(&mesh, &sys, &emb).is_ok());
    }

    #[test]
    fn strict_assignments_embed(seed in any::<u64>()) {
        let mut r = rng(seed);
        let mesh = any_mesh(&mut r);
        let sys = TrackSystem::new(&mesh);
        let theta = strict_theta(&mut r, &mesh, &sys);
        prop_assert!(is_strictly_order_preserving(&theta, sys.digraph()));
        let emb = build_embedding(&mesh, &sys, &theta).unwrap();
        let report = validate_embedding(&mesh, &sys, &emb);
        prop_assert!(report.is_ok(), "{:?}", report.issues);
    }

    #[test]
    fn finite_coordinates_do_not_depend_on_the_tree(seed in any::<u64>()) {
        let mut r = rng(seed);
        let mesh = finite_mesh(&mut r);
        let sys = TrackSystem::new(&mesh);
        let theta = strict_theta(&mut r, &mesh, &sys);
        let a = build_embedding(&mesh, &sys, &theta).unwrap();
        let (root, parent) = random_track_tree(&mesh, &sys, &mut r);
        let b = build_embedding_with_tree(&mesh, &sys, &theta, root, &parent).unwrap();
        for (p, q) in a.positions.iter().zip(&b.positions) {
            prop_assert!((p - q).norm() <= 1e-9);
        }
    }

    #[test]
    fn wedge_angles_recover_the_assignment(seed in any::<u64>()) {
        let mut r = rng(seed);
        let mesh = any_mesh(&mut r);
        let sys = TrackSystem::new(&mesh);
        let theta = strict_theta(&mut r, &mesh, &sys);
        let w = wedge_angles_from_assignment(&mesh, &sys, &theta).unwrap();
        let back = assignment_from_wedge_angles(&mesh, &sys, &w).unwrap();
        prop_assert!(theta.distance_up_to_rotation(&back) <= 1e-9);
    }

    #[test]
    fn circle_maps_preserve_order_predicates(seed in any::<u64>()) {
        let mut r = rng(seed);
        let mesh = any_mesh(&mut r);
        let sys = TrackSystem::new(&mesh);
        let d = sys.digraph();
        let theta = TransversalAssignment::new((0..sys.len()).map(|_| r.gen_range(0.0..2.0 * PI)).collect());
        let k = r.gen_range(1..5);
        let map = CircleMap::random(&mut r, k);
        let mapped = map.apply(&theta);
        prop_assert_eq!(is_strictly_order_preserving(&theta, d), is_strictly_order_preserving(&mapped, d));
        prop_assert_eq!(is_order_preserving(&theta, d), is_order_preserving(&mapped, d));
    }

    #[test]
    fn face_orientation_matches_wedge_sines(seed in any::<u64>()) {
        let mut r = rng(seed);
        let mesh = any_mesh(&mut r);
        let sys = TrackSystem::new(&mesh);
        let theta = strict_theta(&mut r, &mesh, &sys);
        let emb = build_embedding(&mesh, &sys, &theta).unwrap();
        let w = wedge_angles_from_assignment(&mesh, &sys, &theta).unwrap();
        for f in 0..mesh.num_faces() {
            let p = emb.face_polygon(&mesh, f);
            let area = rhombic::geometry::signed_area(&p);
            prop_assert!(area > 0.0);
            prop_assert!((area - w.angles[f][0].sin()).abs() <= 1e-9);
        }
    }

    #[test]
    fn torus_domain_area_is_the_sum_of_rhombi(seed in any::<u64>()) {
        let mut r = rng(seed);
        let mesh = generate::random_torus_lines(&mut r, 5);
        let sys = TrackSystem::new(&mesh);
        let theta = strict_theta(&mut r, &mesh, &sys);
        let emb = build_embedding(&mesh, &sys, &theta).unwrap();
        let w = wedge_angles_from_assignment(&mesh, &sys, &theta).unwrap();
        let rhombi: f64 = w.angles.iter().map(|a| a[0].sin()).sum();
        prop_assert!((emb.domain_area().unwrap().abs() - rhombi).abs() <= 1e-9);
    }

    #[test]
    fn area_is_gauge_invariant(seed in any::<u64>(), c in -10.0..10.0f64) {
        let mut r = rng(seed);
        let mesh = generate::random_torus_lines(&mut r, 5);
        let sys = TrackSystem::new(&mesh);
        let ctx = AreaContext::new(&mesh, &sys).unwrap();
        let theta = strict_theta(&mut r, &mesh, &sys);
        let a = ctx.area(theta.angles());
        let b = ctx.area(theta.rotated(c).angles());
        prop_assert!((a - b).abs() <= 1e-12);
        prop_assert!((a - ctx.pair_area(theta.angles())).abs() <= 1e-12);
    }

    #[test]
    fn area_derivative_along_the_field(seed in any::<u64>()) {
        let mut r = rng(seed);
        let mesh = generate::random_torus_lines(&mut r, 5);
        let sys = TrackSystem::new(&mesh);
        let ctx = AreaContext::new(&mesh, &sys).unwrap();
        let theta = strict_theta(&mut r, &mesh, &sys);
        let t = theta.angles();
        let data = ctx.asymptotic(t);
        prop_assume!(data.degenerate().is_none());
        let v = ctx.ascent_field(t).unwrap();
        let eps = 1e-6;
        let shifted = |s: f64| -> Vec<f64> { t.iter().zip(&v).map(|(a, b)| a + s * b).collect() };
        let fd = (ctx.area(&shifted(eps)) - ctx.area(&shifted(-eps))) / (2.0 * eps);
        let expected: f64 = (0..t.len())
            .map(|i| data.vectors[i].norm() * (t[i] - data.angles[i]).cos().powi(2))
            .sum();
        prop_assert!((fd - expected).abs() <= 1e-6, "{} vs {}", fd, expected);
    }
}

proptest! {
    #![proptest_config(config(24))]

    #[test]
    fn ascent_is_monotone_and_gauge_free(seed in any::<u64>(), c in 0.0..6.0f64) {
        let mut r = rng(seed);
        let mesh = generate::random_torus_lines(&mut r, 4);
        let sys = TrackSystem::new(&mesh);
        let ctx = AreaContext::new(&mesh, &sys).unwrap();
        let start = strict_theta(&mut r, &mesh, &sys);
        let opts = OptimizeOptions::default();
        let a = maximize_area(&ctx, &start, &opts).unwrap();
        let b = maximize_area(&ctx, &start.rotated(c), &opts).unwrap();
        prop_assert!(a.converged && b.converged);
        prop_assert!(a.trace.windows(2).all(|w| w[1].area >= w[0].area));
        prop_assert!(a.theta.distance_up_to_rotation(&b.theta) <= 1e-8);
        prop_assert!((a.area - b.area).abs() <= 1e-8);
    }

    #[test]
    fn periodic_labels_lift_to_valid_signs(seed in any::<u64>()) {
        let mut r = rng(seed);
        let mesh = generate::random_torus_lines(&mut r, 4);
        let sys = TrackSystem::new(&mesh);
        let classes = homology_classes(&mesh, &sys).unwrap();
        let block = lift_block(&mesh, &sys, &classes, 3).unwrap();
        let labels = enumerate_periodic_labels(sys.digraph()).unwrap();
        prop_assert!(!labels.is_empty());
        for label in &labels {
            let s = lift_labels(label, &block, |_| if r.gen_bool(0.5) { 1 } else { -1 });
            prop_assert!(s.is_valid(&block.digraph));
        }
    }
}
