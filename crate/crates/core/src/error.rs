use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("algebra mismatch")]
    AlgebraMismatch,
    #[error("site {0} outside the working site set")]
    SiteOutside(u32),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("entry count {entries} exceeds the configured cap {cap}")]
    ResourceCap { entries: usize, cap: usize },
    #[error("not certified in A_phi: {0}")]
    NotCertified(String),
    #[error("element support escapes the site set: {0}")]
    SupportEscapes(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("{0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;
