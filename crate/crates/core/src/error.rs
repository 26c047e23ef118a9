use thiserror::Error;

/// Errors shared across the library.
///
/// Resource limits are always reported as errors, never as silent
/// truncation; an `InternalInconsistency` signals a bug in this crate
/// rather than a property of the input.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension vector has length {got}, quiver has {expected} vertices")]
    DimLength { expected: usize, got: usize },

    #[error("invalid quiver: {0}")]
    InvalidQuiver(String),

    #[error("invalid weighting: {0}")]
    InvalidWeighting(String),

    #[error("resource limit exceeded: {what} needs {needed}, limit is {limit}")]
    ResourceLimit {
        what: String,
        needed: u128,
        limit: u128,
    },

    #[error("division left a nonzero remainder: {0}")]
    InexactDivision(String),

    #[error("arrow multiset is not closed under reversal with negated weight; pass the asymmetric override to proceed")]
    NotGradedSymmetric,

    #[error("polynomial is not symmetric under the vertex-wise variable permutations for degree {0}")]
    NotSymmetric(String),

    #[error("degree mismatch: {0}")]
    DegreeMismatch(String),

    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("interpolated polynomial disagrees with the held-out count at q={q}: predicted {predicted}, counted {counted}")]
    HeldOutMismatch {
        q: u64,
        predicted: String,
        counted: String,
    },

    #[error("interpolation produced a non-integral or negative coefficient: {0}")]
    BadInterpolation(String),

    #[error("expansion variable {var} is absent from denominator factor {factor}")]
    VarAbsentFromFactor { var: String, factor: String },

    #[error("series truncated at order {order}, requested coefficient at order {requested}")]
    InsufficientOrder { order: i64, requested: i64 },

    #[error("unsupported sign structure: {0}")]
    UnsupportedSignStructure(String),

    #[error("invalid generator data: {0}")]
    InvalidDatum(String),

    #[error("internal consistency check failed: {0}")]
    InternalInconsistency(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
