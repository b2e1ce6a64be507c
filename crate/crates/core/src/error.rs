use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is singular")]
    Singular,
    #[error("zero vector where a nonzero one is required")]
    ZeroVector,
    #[error("invalid flag: {0}")]
    InvalidFlag(String),
    #[error("invalid frame: {0}")]
    InvalidFrame(String),
    #[error("invalid symplectic form: {0}")]
    InvalidForm(String),
    #[error("invalid group: {0}")]
    InvalidGroup(String),
    #[error("non-integral labels: {0}")]
    NonIntegral(String),
    #[error("{what} exceeded budget of {budget}")]
    BudgetExceeded { what: String, budget: usize },
    #[error("invalid cone: {0}")]
    InvalidCone(String),
    #[error("point lies outside the support of the fan")]
    OutsideSupport,
    #[error("invalid piecewise-linear map: {0}")]
    InvalidMap(String),
    #[error("incompatible ray data at cone {cone}: {reason}")]
    Incompatible { cone: usize, reason: String },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
