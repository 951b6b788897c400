//! Mesh families used by tests, benchmarks and the command line.

use std::collections::HashMap;

use num_integer::Integer;
use rand::Rng;

use crate::mesh::{Offset, QuadMesh, Surface, VertexId};
use crate::{Error, Result};

/// `cols x rows` grid of unit squares. Vertex `(i, j)` has id
/// `j * (cols + 1) + i`; faces are listed row by row.
pub fn grid(cols: usize, rows: usize) -> QuadMesh {
    let id = |i: usize, j: usize| j * (cols + 1) + i;
    let mut faces = Vec::with_capacity(cols * rows);
    for j in 0..rows {
        for i in 0..cols {
            faces.push([id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)]);
        }
    }
    QuadMesh::from_faces(Surface::Planar, (cols + 1) * (rows + 1), &faces, &[])
        .expect("grid is a valid mesh")
}

/// Builds a torus mesh from faces whose corners are given as
/// (vertex, deck copy) pairs; edge offsets are copy differences.
pub fn torus_from_lifted_faces(
    num_vertices: usize,
    faces: &[[(VertexId, Offset); 4]],
) -> Result<QuadMesh> {
    let mut quads = Vec::with_capacity(faces.len());
    let mut offsets = Vec::with_capacity(4 * faces.len());
    for corners in faces {
        quads.push(corners.map(|(v, _)| v));
        for i in 0..4 {
            let (a, b) = (corners[i].1, corners[(i + 1) % 4].1);
            offsets.push([b[0] - a[0], b[1] - a[1]]);
        }
    }
    Ok(QuadMesh::from_faces(
        Surface::Torus,
        num_vertices,
        &quads,
        &offsets,
    )?)
}

/// `cols x rows` grid on the torus. Vertex `(i, j)` has id `j * cols + i`.
pub fn torus_grid(cols: usize, rows: usize) -> QuadMesh {
    let (w, h) = (cols as i64, rows as i64);
    let corner = |x: i64, y: i64| {
        let v = (y.mod_floor(&h) * w + x.mod_floor(&w)) as usize;
        (v, [Integer::div_floor(&x, &w), Integer::div_floor(&y, &h)])
    };
    let mut faces = Vec::new();
    for j in 0..h {
        for i in 0..w {
            faces.push([
                corner(i, j),
                corner(i + 1, j),
                corner(i + 1, j + 1),
                corner(i, j + 1),
            ]);
        }
    }
    torus_from_lifted_faces(cols * rows, &faces).expect("torus grid is a valid mesh")
}

/// A cube with its bottom face removed, drawn in the plane: the bottom
/// square (vertices 0..4) is the outer boundary, the top square (4..8)
/// the central face. The band of four side faces closes up.
pub fn cube_minus_face() -> QuadMesh {
    let mut faces = vec![[4, 5, 6, 7]];
    for i in 0..4 {
        let j = (i + 1) % 4;
        faces.push([i, j, 4 + j, 4 + i]);
    }
    QuadMesh::from_faces(Surface::Planar, 8, &faces, &[]).expect("valid mesh")
}

/// Dual quad mesh of a wiring diagram with `wires` pseudolines. Each entry
/// of `levels` is a crossing between the wires currently at positions
/// `level - 1` and `level`. Every wire must take part in some crossing and
/// no pair of wires may cross twice.
pub fn wiring_diagram(wires: usize, levels: &[usize]) -> Result<QuadMesh> {
    if wires < 2 {
        return Err(Error::Generate("a wiring diagram needs two wires".into()));
    }
    let mut perm: Vec<usize> = (0..wires).collect();
    let mut crossed = vec![false; wires];
    // gap k lies between positions k-1 and k; gaps 0 and `wires` are the
    // bottom and top cells.
    let mut cell: Vec<usize> = (0..=wires).collect();
    let mut next_cell = wires + 1;
    let mut faces = Vec::with_capacity(levels.len());
    for &k in levels {
        if k == 0 || k >= wires {
            return Err(Error::Generate(format!(
                "crossing level {k} outside 1..{wires}"
            )));
        }
        let (a, b) = (perm[k - 1], perm[k]);
        if a > b {
            return Err(Error::Generate(format!(
                "wires {b} and {a} cross twice in the wiring diagram"
            )));
        }
        crossed[a] = true;
        crossed[b] = true;
        perm.swap(k - 1, k);
        let right = next_cell;
        next_cell += 1;
        faces.push([cell[k - 1], right, cell[k + 1], cell[k]]);
        cell[k] = right;
    }
    if let Some(w) = crossed.iter().position(|&c| !c) {
        return Err(Error::Generate(format!("wire {w} crosses no other wire")));
    }
    // Renumber cells by first appearance so every vertex lies on a face.
    let mut ids = HashMap::new();
    for face in &mut faces {
        for v in face.iter_mut() {
            let n = ids.len();
            *v = *ids.entry(*v).or_insert(n);
        }
    }
    Ok(QuadMesh::from_faces(
        Surface::Planar,
        ids.len(),
        &faces,
        &[],
    )?)
}

/// Random wiring diagram with `wires` pseudolines and up to `max_crossings`
/// crossings, each pair crossing at most once. Returns the crossing levels.
pub fn random_wiring_levels<R: Rng + ?Sized>(
    rng: &mut R,
    wires: usize,
    max_crossings: usize,
) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..wires).collect();
    let mut levels = Vec::new();
    let target = max_crossings.min(wires * (wires - 1) / 2);
    while levels.len() < target {
        let open: Vec<usize> = (1..wires).filter(|&k| perm[k - 1] < perm[k]).collect();
        if open.is_empty() {
            break;
        }
        let k = open[rng.gen_range(0..open.len())];
        perm.swap(k - 1, k);
        levels.push(k);
    }
    // Make sure every wire crosses something by appending crossings for
    // untouched wires while possible.
    let mut touched = vec![false; wires];
    let mut p: Vec<usize> = (0..wires).collect();
    for &k in &levels {
        touched[p[k - 1]] = true;
        touched[p[k]] = true;
        p.swap(k - 1, k);
    }
    while let Some(w) = touched.iter().position(|&t| !t) {
        let pos = p.iter().position(|&x| x == w).unwrap();
        let k = if pos + 1 < wires && p[pos] < p[pos + 1] {
            pos + 1
        } else if pos > 0 && p[pos - 1] < p[pos] {
            pos
        } else {
            break;
        };
        touched[p[k - 1]] = true;
        touched[p[k]] = true;
        p.swap(k - 1, k);
        levels.push(k);
    }
    levels
}

/// Random admissible finite mesh from a wiring diagram.
pub fn random_wiring_mesh<R: Rng + ?Sized>(
    rng: &mut R,
    wires: usize,
    max_crossings: usize,
) -> QuadMesh {
    loop {
        let levels = random_wiring_levels(rng, wires, max_crossings);
        if let Ok(mesh) = wiring_diagram(wires, &levels) {
            return mesh;
        }
    }
}

/// A closed geodesic on the unit torus: the lines `<n, x> = offset + k`
/// with normal `n = (-q, p)` for primitive class `(p, q)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TorusLine {
    pub class: [i64; 2],
    pub offset: f64,
}

impl TorusLine {
    pub fn new(p: i64, q: i64, offset: f64) -> Self {
        TorusLine {
            class: [p, q],
            offset,
        }
    }

    fn normal(&self) -> [i64; 2] {
        [-self.class[1], self.class[0]]
    }
}

fn det(a: [i64; 2], b: [i64; 2]) -> i64 {
    a[0] * b[1] - a[1] * b[0]
}

/// Dual quad mesh of an arrangement of closed geodesics on the unit torus.
/// Straight lines in general position always give an admissible mesh whose
/// train tracks are the lines themselves.
pub fn torus_lines(lines: &[TorusLine]) -> Result<QuadMesh> {
    let normals: Vec<[i64; 2]> = lines.iter().map(TorusLine::normal).collect();
    for (i, l) in lines.iter().enumerate() {
        if l.class[0].gcd(&l.class[1]) != 1 {
            return Err(Error::Generate(format!(
                "line {i} has non-primitive class ({}, {})",
                l.class[0], l.class[1]
            )));
        }
    }
    let reference = (0..lines.len())
        .flat_map(|i| (i + 1..lines.len()).map(move |j| (i, j)))
        .find(|&(i, j)| det(normals[i], normals[j]) != 0)
        .ok_or_else(|| Error::Generate("need two lines of independent classes".into()))?;
    let (r1, r2) = reference;
    let ref_det = det(normals[r1], normals[r2]);

    let value = |l: usize, x: [f64; 2]| {
        normals[l][0] as f64 * x[0] + normals[l][1] as f64 * x[1] - lines[l].offset
    };
    // Canonical representative of a cell signature and its deck copy.
    let canonical = |s: &[i64]| -> (Vec<i64>, Offset) {
        let (a, b) = (normals[r1], normals[r2]);
        // adj(M) * (s_r1, s_r2) / det(M), floored.
        let z0 = b[1] * s[r1] - a[1] * s[r2];
        let z1 = -b[0] * s[r1] + a[0] * s[r2];
        let t = [Integer::div_floor(&z0, &ref_det), Integer::div_floor(&z1, &ref_det)];
        let rep = s
            .iter()
            .zip(&normals)
            .map(|(&v, n)| v - (n[0] * t[0] + n[1] * t[1]))
            .collect();
        (rep, t)
    };

    let mut crossings = Vec::new();
    for i in 0..lines.len() {
        for j in i + 1..lines.len() {
            let d = det(normals[i], normals[j]);
            if d == 0 {
                continue;
            }
            let (a, b) = (normals[i], normals[j]);
            let mut found: Vec<[f64; 2]> = Vec::new();
            for u in 0..d.abs() {
                for w in 0..d.abs() {
                    let rhs = [lines[i].offset + u as f64, lines[j].offset + w as f64];
                    let x = [
                        (b[1] as f64 * rhs[0] - a[1] as f64 * rhs[1]) / d as f64,
                        (-b[0] as f64 * rhs[0] + a[0] as f64 * rhs[1]) / d as f64,
                    ];
                    let x = x.map(|c| {
                        let r = c.rem_euclid(1.0);
                        if r > 1.0 - 1e-12 {
                            0.0
                        } else {
                            r
                        }
                    });
                    let dup = found.iter().any(|y| {
                        (0..2).all(|k| {
                            let diff = (x[k] - y[k]).abs();
                            diff < 1e-9 || (1.0 - diff) < 1e-9
                        })
                    });
                    if !dup {
                        found.push(x);
                    }
                }
            }
            found.sort_by(|p, q| p.partial_cmp(q).unwrap());
            for x in found {
                crossings.push((i, j, x));
            }
        }
    }

    let mut cell_ids: HashMap<Vec<i64>, usize> = HashMap::new();
    let mut faces = Vec::with_capacity(crossings.len());
    for &(i, j, x) in &crossings {
        let mut base = Vec::with_capacity(lines.len());
        for l in 0..lines.len() {
            let g = value(l, x);
            if l == i || l == j {
                base.push(g.round() as i64);
            } else {
                if (g - g.round()).abs() < 1e-7 {
                    return Err(Error::Generate(format!(
                        "line {l} passes through the crossing of lines {i} and {j}"
                    )));
                }
                base.push(g.floor() as i64);
            }
        }
        let (a, b) = (normals[i], normals[j]);
        let d = det(a, b) as f64;
        // Columns of the inverse normal matrix: moving along `dual_i` raises
        // the value of line i only.
        let dual_i = [b[1] as f64 / d, -b[0] as f64 / d];
        let dual_j = [-a[1] as f64 / d, a[0] as f64 / d];
        let mut corners = Vec::with_capacity(4);
        for (si, sj) in [(0i64, 0i64), (1, 0), (0, 1), (1, 1)] {
            let mut s = base.clone();
            s[i] += si - 1;
            s[j] += sj - 1;
            let (ci, cj) = ((2 * si - 1) as f64, (2 * sj - 1) as f64);
            let dir = [
                ci * dual_i[0] + cj * dual_j[0],
                ci * dual_i[1] + cj * dual_j[1],
            ];
            corners.push((dir[1].atan2(dir[0]), s));
        }
        let start = corners[0].0;
        corners.sort_by(|p, q| {
            let ap = (p.0 - start).rem_euclid(std::f64::consts::TAU);
            let aq = (q.0 - start).rem_euclid(std::f64::consts::TAU);
            ap.partial_cmp(&aq).unwrap()
        });
        let lifted: Vec<(VertexId, Offset)> = corners
            .into_iter()
            .map(|(_, s)| {
                let (rep, t) = canonical(&s);
                let n = cell_ids.len();
                let id = *cell_ids.entry(rep).or_insert(n);
                (id, t)
            })
            .collect();
        faces.push([lifted[0], lifted[1], lifted[2], lifted[3]]);
    }
    torus_from_lifted_faces(cell_ids.len(), &faces)
}

/// Random admissible torus mesh from 2..=`max_lines` straight lines with
/// small primitive classes, at least two of them independent.
pub fn random_torus_lines<R: Rng + ?Sized>(rng: &mut R, max_lines: usize) -> QuadMesh {
    const CLASSES: [[i64; 2]; 8] = [
        [1, 0],
        [0, 1],
        [1, 1],
        [1, -1],
        [2, 1],
        [1, 2],
        [2, -1],
        [1, -2],
    ];
    loop {
        let count = rng.gen_range(2..=max_lines.max(2));
        let lines: Vec<TorusLine> = (0..count)
            .map(|_| {
                let c = CLASSES[rng.gen_range(0..CLASSES.len())];
                TorusLine::new(c[0], c[1], rng.gen_range(0.02..0.98))
            })
            .collect();
        if let Ok(mesh) = torus_lines(&lines) {
            return mesh;
        }
    }
}

/// The torus mesh with three tracks of classes (1,0), (0,1), (1,1): three
/// rhombi, three vertices.
pub fn three_rhombus_torus() -> QuadMesh {
    torus_lines(&[
        TorusLine::new(1, 0, 0.25),
        TorusLine::new(0, 1, 0.5),
        TorusLine::new(1, 1, 0.125),
    ])
    .expect("general position")
}

/// `cols x rows` torus grid (both at least 2) with face 0 replaced by the
/// five faces of [`cube_minus_face`]. The side band becomes a
/// null-homologous closed track crossing the row and column through the
/// patch twice each.
pub fn torus_grid_with_band(cols: usize, rows: usize) -> QuadMesh {
    assert!(cols >= 2 && rows >= 2);
    let (w, h) = (cols as i64, rows as i64);
    let corner = |x: i64, y: i64| {
        let v = (y.mod_floor(&h) * w + x.mod_floor(&w)) as usize;
        (v, [Integer::div_floor(&x, &w), Integer::div_floor(&y, &h)])
    };
    let mut faces = Vec::new();
    for j in 0..h {
        for i in 0..w {
            if i == 0 && j == 0 {
                continue;
            }
            faces.push([
                corner(i, j),
                corner(i + 1, j),
                corner(i + 1, j + 1),
                corner(i, j + 1),
            ]);
        }
    }
    let outer = [corner(0, 0), corner(1, 0), corner(1, 1), corner(0, 1)];
    let base = cols * rows;
    let inner: Vec<(VertexId, Offset)> = (0..4).map(|i| (base + i, [0, 0])).collect();
    faces.push([inner[0], inner[1], inner[2], inner[3]]);
    for i in 0..4 {
        let j = (i + 1) % 4;
        faces.push([outer[i], outer[j], inner[j], inner[i]]);
    }
    torus_from_lifted_faces(base + 4, &faces).expect("valid mesh")
}
