//! Weighted tensor network graphs.
//!
//! A [`TNGraph`] carries vertices, oriented entanglement edges and dangling
//! physical edges, each with a weight (the dimension of the space attached to
//! it). Grid graphs additionally record, for every edge endpoint, which
//! geometric [`Port`] of the vertex it occupies; this is what lets a single
//! vertex tensor be placed consistently at every site of a grid.

mod graph;
mod json;
mod mincut;

pub use graph::{
    build_open_grid, build_torus_grid, AxisShape, Edge, EdgeId, EdgeKind, GraphBuilder, Port,
    TNGraph, Topology, Vertex, VertexId, WeightProfile,
};
pub use mincut::{brute_force_min_cut, brute_force_min_cut_weighted, BRUTE_FORCE_MAX_VERTICES};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("grid dimensions must be at least 1 (got {m}x{n})")]
    ZeroDimension { m: usize, n: usize },
    #[error("a {m}x{n} torus contains self-loops; torus grids need M >= 2 and N >= 2")]
    TorusSelfLoop { m: usize, n: usize },
    #[error("open grids need an external physical weight `s`")]
    MissingExternalWeight,
    #[error("edge weights must be >= 1 (got {0})")]
    InvalidWeight(usize),
    #[error("unknown vertex {0}")]
    UnknownVertex(usize),
    #[error("unknown edge {0}")]
    UnknownEdge(EdgeId),
    #[error("self-loop on vertex {0} is not supported")]
    SelfLoop(usize),
    #[error("source and sink sets must be nonempty")]
    EmptyTerminals,
    #[error("vertex {0} is both a source and a sink")]
    OverlappingTerminals(usize),
    #[error("brute-force cut enumeration limited to {max} vertices (graph has {got})")]
    TooManyVertices { got: usize, max: usize },
    #[error("cut value overflows 128 bits")]
    Overflow,
    #[error("malformed graph description: {0}")]
    Malformed(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, GraphError>;
