use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("axis {axis} out of range for dimension {dim}")]
    AxisOutOfRange { axis: usize, dim: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("unsupported dimension d = {0}")]
    UnsupportedDimension(usize),
    #[error("eigensolver failure: {0}")]
    Eigen(String),
    #[error("quadrature exactness degree {have} insufficient, need {need}")]
    InsufficientQuadrature { have: u32, need: u32 },
    #[error("numerical reliability: {0}")]
    Reliability(String),
    #[error("unknown test function `{0}`")]
    UnknownFunction(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
