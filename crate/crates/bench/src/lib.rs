//! Seeded mesh fixtures shared by the benchmarks in `benches/`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rhombic::{generate, QuadMesh};

/// Wiring-diagram mesh with every pair of `wires` crossing once, in a
/// seed-dependent order.
pub fn full_wiring(wires: usize, seed: u64) -> QuadMesh {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    generate::random_wiring_mesh(&mut rng, wires, wires * (wires - 1) / 2)
}

pub fn torus_lines(max_lines: usize, seed: u64) -> QuadMesh {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    generate::random_torus_lines(&mut rng, max_lines)
}
