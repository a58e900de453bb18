use thiserror::Error;

/// Errors produced by the geometric and chain operations.
#[derive(Clone, Debug, Error, PartialEq)]
pub enum GeomError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("non-finite coordinate at index {index}")]
    NonFinite { index: usize },

    #[error("empty coordinate tuple")]
    EmptyPoint,

    #[error("singular matrix (relative pivot {pivot:e})")]
    SingularMatrix { pivot: f64 },

    #[error("degenerate simplex (relative Gram determinant {ratio:e})")]
    DegenerateSimplex { ratio: f64 },

    #[error("degenerate cone simplex for term {term}")]
    DegenerateCone { term: usize },

    #[error("inconsistent facet orientation: {0}")]
    OrientationError(String),

    #[error("operation not supported in dimension {0}")]
    UnsupportedDimension(usize),

    #[error("chain is not a cycle")]
    NotACycle,

    #[error("chain is flagged combinatorial-only; metric operations are rejected")]
    CombinatorialOnly,

    #[error("invalid chain: {0}")]
    InvalidChain(String),

    #[error("point is not on the unit sphere (|x| = {norm})")]
    NotOnSphere { norm: f64 },

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("{0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, GeomError>;
