use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("truncation order mismatch: {0} vs {1}")]
    OrderMismatch(u32, u32),
    #[error("series is not a unit: constant term must be 1")]
    NonUnit,
    #[error("invalid wall: {0}")]
    InvalidWall(String),
    #[error("genericity failure at {at}: {what}")]
    Genericity { what: String, at: String },
    #[error("invalid seed: {0}")]
    Seed(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("internal error (bug): {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn genericity(what: impl Into<String>, at: impl Into<String>) -> Self {
        Error::Genericity { what: what.into(), at: at.into() }
    }
}
