//! Error type shared by all modules of the crate.

use thiserror::Error;

/// Errors reported by samplers, the learner, and the analysis routines.
#[derive(Debug, Error)]
pub enum Error {
    /// A dimension argument was zero or otherwise unusable.
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    /// A sparsity level outside `1..=n`.
    #[error("invalid sparsity: s = {s} must satisfy 1 <= s <= {n}")]
    InvalidSparsity { s: usize, n: usize },

    /// Matrix shapes do not conform for the requested operation.
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    /// An input matrix contains NaN or infinite entries.
    #[error("non-finite entry in {0}")]
    NonFinite(&'static str),

    /// A coefficient matrix has a zero column where a nonzero one is required.
    #[error("degenerate model: column {0} is identically zero")]
    DegenerateModel(usize),

    /// A coefficient matrix is rank deficient where full row rank is required.
    #[error("singular model: coefficient matrix is rank deficient")]
    SingularModel,

    /// A trace is missing the ground-truth error columns.
    #[error("trace carries no ground-truth errors; run with trace_against set")]
    MissingGroundTruth,

    /// A contraction factor >= 1 was supplied where a contractive one is required.
    #[error("non-contractive factor q = {0}; recursion check requires q < 1")]
    NonContractive(f64),

    /// An unknown configuration value, e.g. an unrecognized initializer name.
    #[error("unknown configuration value: {0}")]
    UnknownConfig(String),

    /// An operation that needs the generative model was invoked without one.
    #[error("initializer '{0}' requires a ground-truth model")]
    GroundTruthRequired(&'static str),

    /// An invalid run or sampler configuration.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
