//! Small planar geometry helpers.

use std::collections::HashMap;
use std::f64::consts::TAU;

use nalgebra::Vector2;

pub type Vec2 = Vector2<f64>;

pub fn unit(angle: f64) -> Vec2 {
    Vec2::new(angle.cos(), angle.sin())
}

/// `a.x * b.y - a.y * b.x`.
pub fn wedge(a: &Vec2, b: &Vec2) -> f64 {
    a.perp(b)
}

/// Angle reduced to `[0, 2π)`.
pub fn normalize_angle(x: f64) -> f64 {
    let r = x.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Distance between two angles on the circle, in `[0, π]`.
pub fn angle_distance(a: f64, b: f64) -> f64 {
    let d = normalize_angle(a - b);
    d.min(TAU - d)
}

/// Signed area, positive for counterclockwise polygons.
pub fn signed_area(poly: &[Vec2]) -> f64 {
    let n = poly.len();
    (0..n).map(|i| wedge(&poly[i], &poly[(i + 1) % n])).sum::<f64>() / 2.0
}

/// Whether the interiors of two convex polygons overlap by more than
/// `eps`, by the separating axis test.
pub fn convex_overlap(a: &[Vec2], b: &[Vec2], eps: f64) -> bool {
    for poly in [a, b] {
        let n = poly.len();
        for i in 0..n {
            let e = poly[(i + 1) % n] - poly[i];
            let len = e.norm();
            if len == 0.0 {
                continue;
            }
            let axis = Vec2::new(-e.y, e.x) / len;
            let (lo_a, hi_a) = project(a, &axis);
            let (lo_b, hi_b) = project(b, &axis);
            if hi_a - lo_b <= eps || hi_b - lo_a <= eps {
                return false;
            }
        }
    }
    true
}

fn project(poly: &[Vec2], axis: &Vec2) -> (f64, f64) {
    poly.iter()
        .map(|p| p.dot(axis))
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| {
            (lo.min(x), hi.max(x))
        })
}

/// Axis-aligned bounding box.
pub fn bbox(poly: &[Vec2]) -> (Vec2, Vec2) {
    let mut lo = Vec2::new(f64::INFINITY, f64::INFINITY);
    let mut hi = Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in poly {
        lo = lo.inf(p);
        hi = hi.sup(p);
    }
    (lo, hi)
}

/// Uniform-grid spatial hash over bounding boxes.
pub struct SpatialHash {
    cell: f64,
    buckets: HashMap<(i64, i64), Vec<usize>>,
}

impl SpatialHash {
    pub fn new(cell: f64) -> Self {
        SpatialHash {
            cell,
            buckets: HashMap::new(),
        }
    }

    fn range(&self, lo: &Vec2, hi: &Vec2) -> impl Iterator<Item = (i64, i64)> {
        let (x0, y0) = ((lo.x / self.cell).floor() as i64, (lo.y / self.cell).floor() as i64);
        let (x1, y1) = ((hi.x / self.cell).floor() as i64, (hi.y / self.cell).floor() as i64);
        (x0..=x1).flat_map(move |x| (y0..=y1).map(move |y| (x, y)))
    }

    pub fn insert(&mut self, id: usize, lo: &Vec2, hi: &Vec2) {
        let cells: Vec<_> = self.range(lo, hi).collect();
        for c in cells {
            self.buckets.entry(c).or_default().push(id);
        }
    }

    /// Ids whose boxes share a cell with the query box, sorted and
    /// deduplicated.
    pub fn query(&self, lo: &Vec2, hi: &Vec2) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .range(lo, hi)
            .filter_map(|c| self.buckets.get(&c))
            .flatten()
            .copied()
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}
