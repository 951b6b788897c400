//! JSON mesh files.
//!
//! ```json
//! {
//!   "type": "torus",
//!   "vertices": 1,
//!   "faces": [
//!     [0, 0, 0, 0]
//!   ],
//!   "offsets": {
//!     "0>0#0": [1, 0],
//!     "0>0#1": [0, 1],
//!     "0>0#2": [-1, 0],
//!     "0>0#3": [0, -1]
//!   }
//! }
//! ```
//!
//! Faces list vertex ids counterclockwise. A directed edge is named
//! `u>v#k`, where `k` counts earlier occurrences of `u -> v` in file order.
//! Offsets not listed are zero. The deck frame must be right handed with
//! respect to the face orientation.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use serde::Deserialize;

use super::{Offset, PlanarMap, QuadMesh, Surface};
use crate::MeshError;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMesh {
    #[serde(rename = "type")]
    kind: Surface,
    vertices: usize,
    faces: Vec<Vec<usize>>,
    #[serde(default)]
    offsets: Option<BTreeMap<String, [i64; 2]>>,
}

fn read_raw(text: &str) -> Result<RawMesh, MeshError> {
    serde_json::from_str(text).map_err(MeshError::Syntax)
}

/// Directed-edge names in id order for a face list.
pub(crate) fn edge_keys(faces: &[Vec<usize>]) -> Vec<String> {
    let mut seen: HashMap<(usize, usize), usize> = HashMap::new();
    let mut keys = Vec::new();
    for poly in faces {
        for i in 0..poly.len() {
            let (u, v) = (poly[i], poly[(i + 1) % poly.len()]);
            let k = seen.entry((u, v)).or_insert(0);
            keys.push(format!("{u}>{v}#{k}"));
            *k += 1;
        }
    }
    keys
}

pub fn parse_mesh(text: &str) -> Result<QuadMesh, MeshError> {
    let raw = read_raw(text)?;
    let mut quads = Vec::with_capacity(raw.faces.len());
    for (f, poly) in raw.faces.iter().enumerate() {
        let quad: [usize; 4] = poly
            .as_slice()
            .try_into()
            .map_err(|_| MeshError::FaceDegree {
                face: f,
                degree: poly.len(),
            })?;
        quads.push(quad);
    }
    let mut offsets = vec![[0, 0]; 4 * quads.len()];
    match (raw.kind, raw.offsets) {
        (Surface::Planar, Some(map)) if !map.is_empty() => {
            return Err(MeshError::Field {
                field: "offsets".into(),
                message: "planar meshes carry no offsets".into(),
            })
        }
        (Surface::Torus, Some(map)) => {
            let keys = edge_keys(&raw.faces);
            let index: HashMap<&str, usize> =
                keys.iter().enumerate().map(|(h, k)| (k.as_str(), h)).collect();
            for (key, value) in map {
                let h = *index.get(key.as_str()).ok_or_else(|| MeshError::Field {
                    field: format!("offsets[\"{key}\"]"),
                    message: "names no directed edge of any face".into(),
                })?;
                offsets[h] = value;
            }
        }
        _ => {}
    }
    QuadMesh::from_faces(raw.kind, raw.vertices, &quads, &offsets)
}

/// Reads a planar map whose faces may have any degree of at least three.
pub fn parse_planar_map(text: &str) -> Result<PlanarMap, MeshError> {
    let raw = read_raw(text)?;
    if raw.kind != Surface::Planar {
        return Err(MeshError::Field {
            field: "type".into(),
            message: "expected a planar map".into(),
        });
    }
    PlanarMap::from_faces(raw.vertices, &raw.faces)
}

/// Writes the mesh in file format with keys in canonical order and
/// two-space indentation. Only nonzero offsets are listed.
pub fn serialize_mesh(mesh: &QuadMesh) -> String {
    let faces: Vec<Vec<usize>> = (0..mesh.num_faces())
        .map(|f| mesh.face_vertices(f).to_vec())
        .collect();
    let mut out = String::new();
    out.push_str("{\n");
    let kind = match mesh.surface() {
        Surface::Planar => "planar",
        Surface::Torus => "torus",
    };
    let _ = writeln!(out, "  \"type\": \"{kind}\",");
    let _ = writeln!(out, "  \"vertices\": {},", mesh.num_vertices());
    out.push_str("  \"faces\": [");
    for (f, poly) in faces.iter().enumerate() {
        let sep = if f == 0 { "\n" } else { ",\n" };
        let _ = write!(
            out,
            "{sep}    [{}, {}, {}, {}]",
            poly[0], poly[1], poly[2], poly[3]
        );
    }
    out.push_str(if faces.is_empty() { "]" } else { "\n  ]" });
    if mesh.is_torus() {
        out.push_str(",\n  \"offsets\": {");
        let keys = edge_keys(&faces);
        let mut first = true;
        for (h, key) in keys.iter().enumerate() {
            let o: Offset = mesh.offset(h);
            if o == [0, 0] {
                continue;
            }
            let sep = if first { "\n" } else { ",\n" };
            first = false;
            let _ = write!(out, "{sep}    \"{key}\": [{}, {}]", o[0], o[1]);
        }
        out.push_str(if first { "}" } else { "\n  }" });
    }
    out.push_str("\n}\n");
    out
}
