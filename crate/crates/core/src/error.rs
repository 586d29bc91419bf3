use thiserror::Error;

/// Workbench-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid curve: {0}")]
    InvalidCurve(String),
    #[error("invalid point: {0}")]
    InvalidPoint(String),
    #[error("invalid divisor: {0}")]
    InvalidDivisor(String),
    #[error("zero element has no {0}")]
    ZeroElement(&'static str),
    #[error("pole order bound exceeded: {0}")]
    PoleBound(String),
    #[error("bundle mismatch: {0}")]
    BundleMismatch(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("unsupported regime: {0}")]
    UnsupportedRegime(String),
    #[error("apparent-singularity map undefined: {0}")]
    UndefinedApp(String),
    #[error("pair lies on the incidence locus: {0}")]
    SigmaLocus(String),
    #[error("internal consistency failure: {0}")]
    Internal(String),
    #[error("scenario schema error at {field}: {message}")]
    Schema { field: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
