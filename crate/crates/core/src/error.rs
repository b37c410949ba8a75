use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by graph construction, propagation, training and I/O.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got} ({context})")]
    DimensionMismatch {
        expected: usize,
        got: usize,
        context: &'static str,
    },

    #[error("node index {index} out of range for graph with {n} nodes")]
    NodeOutOfRange { index: usize, n: usize },

    #[error("invalid edge weight {weight} on ({u}, {v}); weights must be finite and positive")]
    InvalidWeight { u: usize, v: usize, weight: f64 },

    #[error("class {class} out of range for {num_classes} classes")]
    ClassOutOfRange { class: usize, num_classes: usize },

    #[error("row {row} violates the probability simplex (row sum {sum}, min entry {min})")]
    SimplexViolation { row: usize, sum: f64, min: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("classes without enough labeled candidates (need {needed} each): {classes:?}")]
    DeficientClasses { needed: usize, classes: Vec<usize> },

    #[error("dense solve limited to {limit} nodes, got {n}")]
    TooLargeForDense { n: usize, limit: usize },

    #[error("singular linear system")]
    Singular,

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("{path}: line {line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Whether the error stems from numerics rather than input data or usage.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::SimplexViolation { .. } | Error::Singular | Error::NonFinite(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
