use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A parameter violates an operation precondition.
    InvalidParameter { name: &'static str, reason: String },
    /// A constructed operator is not a valid density matrix.
    InvalidState { min_eigenvalue: f64 },
    /// The OAM truncation keeps too little of the pre-normalization trace.
    TruncationTooAggressive { captured: f64, l_out: i64 },
    /// A quantity that must be non-negative came out clearly negative.
    NumericalInconsistency { quantity: &'static str, value: f64 },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParameter { name, reason } => {
                write!(f, "invalid parameter `{name}`: {reason}")
            }
            Error::InvalidState { min_eigenvalue } => write!(
                f,
                "not a valid density matrix: smallest eigenvalue {min_eigenvalue:e}"
            ),
            Error::TruncationTooAggressive { captured, l_out } => write!(
                f,
                "OAM truncation |l| <= {l_out} keeps only {captured:.4} of the trace"
            ),
            Error::NumericalInconsistency { quantity, value } => {
                write!(f, "numerical inconsistency: {quantity} = {value:e}")
            }
        }
    }
}

impl core::error::Error for Error {}
