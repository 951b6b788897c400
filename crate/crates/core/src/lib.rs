//! Rhombic embeddings of quad graphs.
//!
//! The crate decides whether a planar or toroidal graph whose faces all have
//! degree four admits an embedding with every edge of unit length, builds
//! such embeddings from train-track data, enumerates the extreme points of
//! the space of embeddings, and finds the maximal-area embedding of a torus
//! graph by ascent.
//!
//! The main pipeline:
//!
//! ```
//! use rhombic::{embed, generate, tracks};
//!
//! let mesh = generate::grid(3, 2);
//! let system = tracks::TrackSystem::new(&mesh);
//! assert!(tracks::check_embeddable_finite(&mesh, &system).is_empty());
//! let theta = embed::boundary_chord_assignment(&mesh, &system).unwrap();
//! let emb = embed::build_embedding(&mesh, &system, &theta).unwrap();
//! assert!(embed::validate_embedding(&mesh, &system, &emb).is_ok());
//! ```

pub mod angles;
pub mod diamond;
pub mod embed;
pub mod extremes;
pub mod generate;
pub mod geometry;
pub mod homology;
pub mod mesh;
pub mod optimize;
pub mod tracks;

pub use angles::{CircleMap, TransversalAssignment, WedgeAngles};
pub use diamond::{diamond_graph, DiamondMesh, VertexTag};
pub use embed::{EmbeddingReport, RhombicEmbedding};
pub use extremes::{HeightFunction, PeriodicLabel, SignAssignment};
pub use homology::HomologyClass;
pub use mesh::{
    parse_mesh, parse_planar_map, serialize_mesh, validate_mesh, Diagnostic, PlanarMap, QuadMesh,
    Surface,
};
pub use optimize::{AreaContext, AsymptoticData, OptimizeOptions, OptimizeResult};
pub use tracks::{CrossingDigraph, OrientedTrack, TrackSystem, TrainTrack, Violation};

use thiserror::Error;

/// Errors raised while reading or assembling a mesh.
#[derive(Debug, Error)]
pub enum MeshError {
    #[error("malformed mesh file: {0}")]
    Syntax(#[from] serde_json::Error),
    #[error("{field}: {message}")]
    Field { field: String, message: String },
    #[error("faces[{face}]: face degree {degree} ≠ 4")]
    FaceDegree { face: usize, degree: usize },
    #[error("faces[{face}][{corner}]: vertex {vertex} out of range (vertices = {count})")]
    DanglingVertex {
        face: usize,
        corner: usize,
        vertex: usize,
        count: usize,
    },
    #[error("offsets: {0}")]
    OffsetAntisymmetry(String),
    #[error("{0}")]
    Structure(String),
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error("operation requires a {expected:?} mesh")]
    WrongSurface { expected: Surface },
    #[error("mesh is not embeddable: {}", join(.0))]
    NotEmbeddable(Vec<Violation>),
    #[error("assignment is not strictly order preserving across {from} -> {to}")]
    NotStrictlyOrderPreserving { from: OrientedTrack, to: OrientedTrack },
    #[error("inconsistent wedge angles at {location}: {detail}")]
    InconsistentWedges { location: String, detail: String },
    #[error("{what} has {got} entries, expected {expected}")]
    Length {
        what: &'static str,
        got: usize,
        expected: usize,
    },
    #[error("track {track}: scale factor {factor} is not positive")]
    NonPositiveFactor { track: usize, factor: f64 },
    #[error("invalid circle map: {0}")]
    InvalidCircleMap(String),
    #[error("{tracks} tracks exceed the enumeration limit of {limit}")]
    TooManyTracks { tracks: usize, limit: usize },
    #[error("diamond graph: {0}")]
    Diamond(String),
    #[error("homology: {0}")]
    Homology(String),
    #[error("asymptotic vector of track {0} vanishes")]
    DegenerateAsymptotic(usize),
    #[error("invalid sign assignment: {0}")]
    InvalidSigns(String),
    #[error("generator: {0}")]
    Generate(String),
}

fn join<T: std::fmt::Display>(items: &[T]) -> String {
    items
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
