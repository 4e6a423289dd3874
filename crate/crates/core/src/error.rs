use thiserror::Error;

/// Errors produced by the geometry, sampling, estimation and benchmark layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid dimension {0}")]
    InvalidDimension(usize),

    #[error("degenerate body: {0}")]
    Degenerate(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("non-finite coordinate at point {0}")]
    NonFinite(usize),

    #[error("rejection sampling gave up after {0} consecutive rejections")]
    RejectionCap(u64),

    #[error("numerical failure in hull construction: {0}")]
    Numerical(&'static str),

    #[error("replicate {replicate} at grid point {grid_index} failed: {source}")]
    Replicate {
        grid_index: usize,
        replicate: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
