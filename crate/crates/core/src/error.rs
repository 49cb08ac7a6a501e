use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-finite coordinate at index {index}")]
    NonFinite { index: usize },

    #[error("insufficient data: need at least {needed} points, got {got}")]
    InsufficientData { needed: u64, got: u64 },

    #[error("degenerate variance")]
    DegenerateVariance,

    #[error("p-value undefined: df < 1")]
    PValueUndefined,

    #[error("invalid region: {0}")]
    InvalidRegion(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A numerical invariant did not hold. Never caused by user input.
    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    pub fn is_internal(&self) -> bool {
        matches!(self, Error::Internal(_))
    }
}
