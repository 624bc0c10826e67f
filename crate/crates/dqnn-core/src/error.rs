//! Crate-wide error type.

use alloc::string::String;
use core::fmt;

/// Errors surfaced by state construction, linear algebra, and training.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Matrix or state dimensions do not line up.
    DimensionMismatch { expected: usize, actual: usize },
    /// A 1-based qubit or parameter index lies outside its valid range.
    IndexOutOfRange { index: usize, limit: usize },
    /// Input expected to be Hermitian is not, within tolerance.
    NotHermitian { residual: f64 },
    /// An eigenvalue fell below the negativity tolerance of a PSD input.
    NotPositiveSemidefinite { eigenvalue: f64 },
    /// An argument violates a documented precondition.
    InvalidArgument(String),
    /// A non-finite number appeared where finite data is required.
    NonFinite,
    /// Training aborted because cost or gradient became non-finite.
    NonFiniteAtRound { round: usize },
    /// The operation requires at least one training pair.
    EmptyDataset,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch { expected, actual } => {
                write!(f, "dimension mismatch: expected {expected}, got {actual}")
            }
            Error::IndexOutOfRange { index, limit } => {
                write!(f, "index {index} out of range 1..={limit}")
            }
            Error::NotHermitian { residual } => {
                write!(f, "matrix is not Hermitian (residual {residual:.3e})")
            }
            Error::NotPositiveSemidefinite { eigenvalue } => {
                write!(f, "matrix is not PSD (eigenvalue {eigenvalue:.3e})")
            }
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            Error::NonFinite => write!(f, "non-finite value encountered"),
            Error::NonFiniteAtRound { round } => {
                write!(f, "non-finite cost or gradient at training round {round}")
            }
            Error::EmptyDataset => write!(f, "operation requires a non-empty dataset"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
