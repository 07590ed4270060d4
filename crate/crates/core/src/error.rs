use thiserror::Error;

/// Errors raised by the arithmetic, certification and expansion routines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("polynomial {0} is not irreducible")]
    NotIrreducible(String),

    #[error("field of size {0} exceeds the supported table size")]
    FieldTooLarge(u64),

    #[error("insufficient precision: need {needed}, have {have}")]
    InsufficientPrecision { needed: i64, have: i64 },

    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),

    #[error("value at point {index} is not integral")]
    NotIntegral { index: usize },

    #[error("exact division failed: nonzero remainder")]
    NotDivisible,

    #[error("seeds do not separate points {v} and {w}")]
    NotSeparating { v: usize, w: usize },

    #[error("basis is not certified at level {level}: {reason}")]
    NotCertified { level: u32, reason: String },

    #[error("level mismatch: {0} vs {1}")]
    LevelMismatch(u32, u32),

    #[error("variable X_{index} is out of range for level {level}")]
    VariableOutOfRange { index: usize, level: u32 },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    /// True for failures of a mathematical check (as opposed to malformed input).
    pub fn is_mathematical(&self) -> bool {
        matches!(
            self,
            Error::InsufficientPrecision { .. }
                | Error::PrecisionExhausted(_)
                | Error::NotSeparating { .. }
                | Error::NotCertified { .. }
                | Error::NotDivisible
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
