use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = CboError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum CboError {
    #[error("invalid space: {0}")]
    InvalidSpace(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("category index {value} out of range for variable {index} with arity {arity}")]
    CategoryOutOfRange {
        index: usize,
        value: usize,
        arity: usize,
    },

    #[error("bit pattern has rank {rank}, outside the image of a space with {cardinality} combinations")]
    OutOfImage { rank: u64, cardinality: u64 },

    #[error("space has {cardinality} combinations, above the enumeration cap of {cap}")]
    EnumerationCap { cardinality: u64, cap: u64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("kernel matrix not positive definite even with jitter {jitter:e} (min diagonal {min_diag:e})")]
    NotPositiveDefinite { jitter: f64, min_diag: f64 },

    #[error("empty candidate set")]
    EmptyCandidates,

    #[error("lookup table file: {0}")]
    TableFormat(String),

    #[error("objective evaluation failed: {0}")]
    Objective(String),

    #[error("config: {0}")]
    Config(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl CboError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CboError::Io {
            path: path.into(),
            source,
        }
    }
}
