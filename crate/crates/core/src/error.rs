//! Error types shared across the crate.

use thiserror::Error;

/// Errors produced by matrix kernels, solvers, generators, and file I/O.
#[derive(Debug, Error)]
pub enum Error {
    /// A Cholesky pivot was zero, negative, or non-finite. `pivot_index` is
    /// the 0-based row at which factorization broke down; `stage` names the
    /// computation that required the factorization.
    #[error("matrix is not positive definite (pivot {pivot_index}, during {stage})")]
    NotPositiveDefinite { pivot_index: usize, stage: &'static str },

    /// Two operands had incompatible dimensions.
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// A constructor was handed a NaN or infinite entry.
    #[error("non-finite entry at ({row}, {col})")]
    NotFinite { row: usize, col: usize },

    /// A configuration value violated its documented range.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// The random-sparsity generator could not land inside the requested
    /// density band.
    #[error("generation failed: {0}")]
    GenerationFailed(String),

    /// `reference_solve` refuses instances above its documented size cap.
    #[error("instance too large: p = {p} exceeds the reference-solver cap of {max}")]
    InstanceTooLarge { p: usize, max: usize },

    /// A solver run ended in a failure state.
    #[error("solver failed: {0}")]
    Solver(String),

    /// A config or matrix file failed to parse.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// Unsupported RNG algorithm name in a spec or manifest.
    #[error("unknown rng algorithm {0:?}")]
    UnknownRngAlgorithm(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse { line, message: message.into() }
    }
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
