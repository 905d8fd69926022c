//! Exact sparse tensors, network contraction, flattening and rank.
//!
//! All arithmetic is exact: entries are arbitrary-precision rationals, and
//! ranks are computed either over the rationals or over a prime field.

mod io;
mod matrix;
mod network;
mod random;
mod rank;
mod sparse;

pub use io::{parse_tensor, write_tensor};
pub use matrix::{flatten, FlatteningSpec, SparseMatrix};
pub use network::{
    bound_contract, constant_assignment, default_schedule, network_contract, network_contract_with,
    place_roles, role_label, Assignment, ContractOptions, ContractStats,
};
pub use random::{random_tensor, RandomMode};
pub use rank::{
    is_prime, rank, rank_by_elimination, rank_mod_p, rank_with, ScalarMode, DEFAULT_PRIME,
};
pub use sparse::{contract_pair, Axis, Label, SparseTensor};

use num_bigint::BigInt;
use num_rational::BigRational;
use thiserror::Error;

use crate::netgraph::{EdgeId, GraphError};

pub type Scalar = BigRational;

/// Integer as an exact scalar.
pub fn int(x: i64) -> Scalar {
    BigRational::from_integer(BigInt::from(x))
}

#[derive(Debug, Error)]
pub enum TensorError {
    #[error("duplicate axis label `{0}`")]
    DuplicateLabel(Label),
    #[error("axis `{0}` has invalid dimension {1}")]
    BadDimension(Label, usize),
    #[error("invalid axis label `{0}`")]
    BadLabel(String),
    #[error("expected {expected} indices or items, got {got}")]
    Arity { expected: usize, got: usize },
    #[error("index {index} out of bounds for axis `{label}` of dimension {dim}")]
    IndexOutOfBounds {
        label: Label,
        index: usize,
        dim: usize,
    },
    #[error("unknown axis label `{0}`")]
    UnknownLabel(Label),
    #[error("axis `{0}` or `{1}` appears in more than one contraction pair")]
    RepeatedPair(Label, Label),
    #[error("dimension mismatch: `{left}` has {left_dim}, `{right}` has {right_dim}")]
    DimensionMismatch {
        left: Label,
        left_dim: usize,
        right: Label,
        right_dim: usize,
    },
    #[error("contraction of `{0}` with `{1}` needs exactly one dual axis")]
    Variance(Label, Label),
    #[error("tensors have different axes")]
    AxesDiffer,
    #[error("invalid assignment at vertex {vertex}: {reason}")]
    InvalidAssignment { vertex: String, reason: String },
    #[error("schedule entry {0} is not an entanglement edge")]
    ScheduleEdge(EdgeId),
    #[error("graph is not regular: {0}")]
    NonRegular(String),
    #[error("vertex tensor does not fit the vertex: {0}")]
    ShapeMismatch(String),
    #[error("flattening does not partition the tensor axes: {0}")]
    Flattening(String),
    #[error("size guard exceeded: {what} is {got}, limit {limit}")]
    TooLarge {
        what: &'static str,
        got: u128,
        limit: u128,
    },
    #[error("{0} is not a prime above 2^30")]
    BadPrime(u64),
    #[error("denominator divisible by the field prime {0}")]
    PrimeDenominator(u64),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
}
