//! Error type shared by every module in the crate.

use alloc::string::String;

/// Errors raised by construction, estimation, selection and solving.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A vector or matrix dimension does not match the operator it is used with.
    DimensionMismatch { expected: usize, got: usize },
    /// Two lists that must be index-aligned have different lengths.
    LengthMismatch { expected: usize, got: usize },
    /// A scalar or integer argument is outside its documented range.
    InvalidParameter(String),
    /// A diagonal block failed its Cholesky factorization.
    BlockNotPositiveDefinite { block: usize },
    /// The small rank-correction system failed its Cholesky factorization.
    CapacitanceNotPositiveDefinite,
    /// A selection routine was handed no candidates.
    EmptyCandidates,
    /// Conjugate gradients hit a nonpositive curvature or inner product.
    Breakdown { iteration: usize },
}

impl core::fmt::Display for Error {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Error::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
            Error::LengthMismatch { expected, got } => {
                write!(f, "length mismatch: expected {expected}, got {got}")
            }
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::BlockNotPositiveDefinite { block } => {
                write!(f, "block not positive definite, block index {block}")
            }
            Error::CapacitanceNotPositiveDefinite => {
                write!(f, "capacitance matrix not positive definite")
            }
            Error::EmptyCandidates => write!(f, "candidate list is empty"),
            Error::Breakdown { iteration } => {
                write!(
                    f,
                    "operator or preconditioner not positive definite at iteration {iteration}"
                )
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
