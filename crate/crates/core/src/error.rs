use crate::reflection::BisectorGeometry;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("points belong to different spaces: {0} vs {1}")]
    SpaceMismatch(&'static str, &'static str),
    #[error("no unique minimal geodesic between the given points")]
    NonUniqueGeodesic,
    #[error("unsupported operation: {0}")]
    Unsupported(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("gasket level {requested} outside supported range 0..={max}")]
    LevelLimit { requested: u32, max: u32 },
    #[error("discretization parity: {0}")]
    Parity(String),
    #[error("no reflection structure exists for this pair; the equidistant set has a singular vertex")]
    NoReflection(Box<BisectorGeometry>),
    #[error("consistency violation: {0}")]
    Consistency(String),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("curves are defined on different time grids")]
    GridMismatch,
    #[error("sample set too small: need at least {needed}, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("unsupported combination: {0}")]
    Capability(String),
    #[error("coupled walk frame failure at step {step}: {reason}")]
    FrameFailure { step: usize, reason: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
