use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rhombic::embed::{boundary_chord_assignment, build_embedding, torus_default_assignment, validate_embedding};
use rhombic::extremes::enumerate_sign_extremes;
use rhombic::optimize::{maximize_area, AreaContext, OptimizeOptions};
use rhombic::tracks::check_embeddable;
use rhombic::{generate, TrackSystem};
use rhombic_bench::{full_wiring, torus_lines};

fn finite(c: &mut Criterion) {
    let mut group = c.benchmark_group("finite");
    for wires in [8, 14, 20] {
        let mesh = full_wiring(wires, 1);
        let sys = TrackSystem::new(&mesh);
        let theta = boundary_chord_assignment(&mesh, &sys).unwrap();
        let emb = build_embedding(&mesh, &sys, &theta).unwrap();
        let faces = mesh.num_faces();
        group.bench_with_input(BenchmarkId::new("tracks", faces), &mesh, |b, m| {
            b.iter(|| TrackSystem::new(black_box(m)))
        });
        group.bench_with_input(BenchmarkId::new("check", faces), &mesh, |b, m| {
            b.iter(|| check_embeddable(m, black_box(&sys)))
        });
        group.bench_with_input(BenchmarkId::new("embed", faces), &mesh, |b, m| {
            b.iter(|| build_embedding(m, &sys, black_box(&theta)).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("validate", faces), &mesh, |b, m| {
            b.iter(|| validate_embedding(m, &sys, black_box(&emb)))
        });
    }
    group.finish();
}

fn torus(c: &mut Criterion) {
    let mut group = c.benchmark_group("torus");
    let meshes = [
        ("grid_2x2", generate::torus_grid(2, 2)),
        ("three_rhombus", generate::three_rhombus_torus()),
        ("lines_6", torus_lines(6, 3)),
    ];
    for (name, mesh) in &meshes {
        let sys = TrackSystem::new(mesh);
        let ctx = AreaContext::new(mesh, &sys).unwrap();
        let mut start = torus_default_assignment(mesh, &sys).unwrap().angles().to_vec();
        start[0] += 0.3;
        let start = rhombic::TransversalAssignment::new(start);
        group.bench_function(BenchmarkId::new("maximize_area", name), |b| {
            b.iter(|| maximize_area(&ctx, black_box(&start), &OptimizeOptions::default()).unwrap())
        });
    }
    group.finish();
}

fn extremes(c: &mut Criterion) {
    let mut group = c.benchmark_group("extremes");
    for wires in [6, 8, 10] {
        let mesh = full_wiring(wires, 2);
        let sys = TrackSystem::new(&mesh);
        group.bench_with_input(BenchmarkId::new("sign_extremes", wires), sys.digraph(), |b, d| {
            b.iter(|| enumerate_sign_extremes(black_box(d)).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, finite, torus, extremes);
criterion_main!(benches);
