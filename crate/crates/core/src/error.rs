use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("index {index} out of range for dimension {dim} (indices are 1-based)")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("state vector must have at least one element")]
    EmptyState,

    #[error("probability {0} is outside [0, 1]")]
    InvalidProbability(f64),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error(
        "singular regression: the {samples} sampled states do not span both features \
         (determinant {determinant:e}); increase samples_per_iter or sample_dim"
    )]
    SingularRegression { samples: usize, determinant: f64 },

    #[error("trace was recorded without array snapshots")]
    SnapshotsDisabled,

    #[error("step {requested} is past the end of a trace with {len} steps")]
    StepOutOfRange { requested: usize, len: usize },

    #[error("cannot summarize an empty sample")]
    EmptySample,

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
