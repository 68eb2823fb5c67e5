use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("usage error: {0}")]
    Usage(String),
    #[error("degenerate metric at {0:?}")]
    DegenerateMetric([f64; 4]),
    #[error("slice is not spacelike at chart point {0:?}")]
    DegenerateSlice([f64; 3]),
    #[error("point {point:?} outside the domain: {reason}")]
    Domain { point: Vec<f64>, reason: String },
    #[error("non-finite value in {0}")]
    NonFinite(String),
    #[error("pole regularity violated: {0}")]
    PoleRegularity(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
