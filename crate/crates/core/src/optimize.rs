//! Area of a periodic rhombic embedding and its maximization.
//!
//! With one angle per track, face `f` crossed by `A` then `B` has area
//! `sin(θ_B - θ_A)`. Summed over ordered pairs of tracks the same total is
//! `½ Σ b_ij sin(θ_j - θ_i)`: each crossing shows up once as `(i, j)` and
//! once as `(j, i)`.
//!
//! Let `v_i = Σ_j b_ij u_j`. Then `∂A/∂θ_i = -<u_i, v_i>`, so the ascent
//! field is `V_i = -cos(α_i - θ_i)` where `α_i` is the angle of `v_i`. The
//! identity `dA(V) = Σ ‖v_i‖ cos²(α_i - θ_i)` holds for this sign.

use serde::Serialize;

use crate::angles::{is_strictly_order_preserving, TransversalAssignment};
use crate::geometry::{unit, Vec2};
use crate::mesh::QuadMesh;
use crate::tracks::{CrossingDigraph, TrackSystem};
use crate::{Error, Result, Surface};

/// Intersection data needed to evaluate the area functional.
#[derive(Clone, Debug)]
pub struct AreaContext {
    /// `(i, j, s)` per face: the face area is `s * sin(θ_j - θ_i)`.
    faces: Vec<(usize, usize, f64)>,
    b: Vec<Vec<i64>>,
    digraph: CrossingDigraph,
}

impl AreaContext {
    pub fn new(mesh: &QuadMesh, system: &TrackSystem) -> Result<Self> {
        if !mesh.is_torus() {
            return Err(Error::WrongSurface {
                expected: Surface::Torus,
            });
        }
        Ok(Self::from_system(system))
    }

    /// Works for any mesh; the area is then the total face area of the
    /// embedding with these angles.
    pub fn from_system(system: &TrackSystem) -> Self {
        let faces = system
            .face_crossings()
            .iter()
            .map(|c| (c.a.track, c.b.track, (c.a.sign() * c.b.sign()) as f64))
            .collect();
        AreaContext {
            faces,
            b: system.digraph().b().to_vec(),
            digraph: system.digraph().clone(),
        }
    }

    pub fn num_tracks(&self) -> usize {
        self.b.len()
    }

    pub fn b(&self) -> &[Vec<i64>] {
        &self.b
    }

    /// Sum of face areas.
    pub fn area(&self, theta: &[f64]) -> f64 {
        self.faces
            .iter()
            .map(|&(i, j, s)| s * (theta[j] - theta[i]).sin())
            .sum()
    }

    /// `½ Σ_{i≠j} b_ij sin(θ_j - θ_i)`.
    pub fn pair_area(&self, theta: &[f64]) -> f64 {
        let n = self.num_tracks();
        let mut sum = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j && self.b[i][j] != 0 {
                    sum += self.b[i][j] as f64 * (theta[j] - theta[i]).sin();
                }
            }
        }
        sum / 2.0
    }

    /// `A(θ') - A(θ)` computed face by face without cancellation.
    pub fn area_increment(&self, from: &[f64], to: &[f64]) -> f64 {
        let delta: Vec<f64> = to.iter().zip(from).map(|(b, a)| b - a).collect();
        self.area_increment_along(from, &delta)
    }

    /// `A(θ + δ) - A(θ)`. Taking `δ` directly keeps the result exact even
    /// when `δ` is below the resolution of the stored angles.
    pub fn area_increment_along(&self, theta: &[f64], delta: &[f64]) -> f64 {
        self.faces
            .iter()
            .map(|&(i, j, s)| {
                let x = theta[j] - theta[i];
                let d = delta[j] - delta[i];
                s * 2.0 * (x + d / 2.0).cos() * (d / 2.0).sin()
            })
            .sum()
    }

    pub fn asymptotic(&self, theta: &[f64]) -> AsymptoticData {
        let n = self.num_tracks();
        let u: Vec<Vec2> = theta.iter().map(|&a| unit(a)).collect();
        let vectors: Vec<Vec2> = (0..n)
            .map(|i| {
                (0..n)
                    .filter(|&j| self.b[i][j] != 0)
                    .map(|j| u[j] * self.b[i][j] as f64)
                    .fold(Vec2::zeros(), |a, b| a + b)
            })
            .collect();
        let angles = vectors.iter().map(|v| v.y.atan2(v.x)).collect();
        AsymptoticData { vectors, angles }
    }

    /// Gradient of the area.
    pub fn gradient(&self, theta: &[f64]) -> Vec<f64> {
        let data = self.asymptotic(theta);
        theta
            .iter()
            .zip(&data.vectors)
            .map(|(&a, v)| -unit(a).dot(v))
            .collect()
    }

    /// `V_i = -cos(α_i - θ_i)`.
    pub fn ascent_field(&self, theta: &[f64]) -> Result<Vec<f64>> {
        let data = self.asymptotic(theta);
        if let Some(i) = data.degenerate() {
            return Err(Error::DegenerateAsymptotic(i));
        }
        Ok(theta
            .iter()
            .zip(&data.angles)
            .map(|(&t, &a)| -(a - t).cos())
            .collect())
    }

    /// `max_i |<u_i, a_i>|`; zero exactly at the maximum.
    pub fn criticality_residual(&self, theta: &[f64]) -> f64 {
        let data = self.asymptotic(theta);
        theta
            .iter()
            .zip(&data.vectors)
            .map(|(&t, v)| {
                let n = v.norm();
                if n == 0.0 {
                    0.0
                } else {
                    (unit(t).dot(v) / n).abs()
                }
            })
            .fold(0.0, f64::max)
    }

    fn strict(&self, theta: &[f64]) -> bool {
        is_strictly_order_preserving(&TransversalAssignment::new(theta.to_vec()), &self.digraph)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AsymptoticData {
    pub vectors: Vec<Vec2>,
    pub angles: Vec<f64>,
}

impl AsymptoticData {
    /// Unit direction of track `i`, if its vector does not vanish.
    pub fn direction(&self, i: usize) -> Option<Vec2> {
        let n = self.vectors[i].norm();
        (n > 0.0).then(|| self.vectors[i] / n)
    }

    /// First track with a vanishing asymptotic vector.
    pub fn degenerate(&self) -> Option<usize> {
        self.vectors.iter().position(|v| v.norm() < 1e-300)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OptimizeOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub initial_step: f64,
}

impl Default for OptimizeOptions {
    fn default() -> Self {
        OptimizeOptions {
            tol: 1e-10,
            max_iter: 100_000,
            initial_step: 0.1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TraceRow {
    pub iteration: usize,
    pub area: f64,
    pub residual: f64,
    pub step: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OptimizeResult {
    /// Final angles with track 0 pinned at 0.
    pub theta: TransversalAssignment,
    pub area: f64,
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
    /// One row per accepted step, starting with the initial point.
    pub trace: Vec<TraceRow>,
}

/// Follows the ascent field with an adaptive step until the residual drops
/// below `opts.tol`.
pub fn maximize_area(
    ctx: &AreaContext,
    start: &TransversalAssignment,
    opts: &OptimizeOptions,
) -> Result<OptimizeResult> {
    start.check_len(ctx.num_tracks())?;
    if let Some((from, to)) = crate::angles::strict_violation(start, &ctx.digraph) {
        return Err(Error::NotStrictlyOrderPreserving { from, to });
    }
    let mut theta = start.angles().to_vec();
    let mut area = ctx.area(&theta);
    let mut residual = ctx.criticality_residual(&theta);
    let mut step = opts.initial_step;
    let mut trace = vec![TraceRow {
        iteration: 0,
        area,
        residual,
        step,
    }];
    let mut iterations = 0;
    while residual >= opts.tol && iterations < opts.max_iter {
        iterations += 1;
        let field = ctx.ascent_field(&theta)?;
        let delta: Vec<f64> = field.iter().map(|v| step * v).collect();
        let cand: Vec<f64> = theta.iter().zip(&delta).map(|(t, d)| t + d).collect();
        if !ctx.strict(&cand) {
            step /= 2.0;
            continue;
        }
        let gain = ctx.area_increment_along(&theta, &delta);
        if gain < 0.0 {
            step /= 2.0;
            if step < 1e-300 {
                break;
            }
            continue;
        }
        theta = cand;
        area += gain;
        residual = ctx.criticality_residual(&theta);
        trace.push(TraceRow {
            iteration: iterations,
            area,
            residual,
            step,
        });
        step *= 1.5;
    }
    Ok(OptimizeResult {
        theta: TransversalAssignment::new(theta).pinned(),
        area,
        residual,
        iterations,
        converged: residual < opts.tol,
        trace,
    })
}
