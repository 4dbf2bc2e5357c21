//! Error classification for the harness: configuration problems exit with
//! code 1, numerical failures with code 2.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum AppError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Numeric(String),
}

impl AppError {
    pub fn config(msg: impl Into<String>) -> Self {
        AppError::Config(msg.into())
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            AppError::Config(_) => 1,
            AppError::Numeric(_) => 2,
        }
    }
}

impl From<pstab::Error> for AppError {
    fn from(e: pstab::Error) -> Self {
        match e {
            // malformed sizes and ranges are configuration mistakes; failed
            // factorizations and breakdowns are numerical failures
            pstab::Error::InvalidParameter(_)
            | pstab::Error::EmptyCandidates
            | pstab::Error::DimensionMismatch { .. }
            | pstab::Error::LengthMismatch { .. } => AppError::Config(e.to_string()),
            pstab::Error::BlockNotPositiveDefinite { .. }
            | pstab::Error::CapacitanceNotPositiveDefinite
            | pstab::Error::Breakdown { .. } => AppError::Numeric(e.to_string()),
        }
    }
}

impl From<std::io::Error> for AppError {
    fn from(e: std::io::Error) -> Self {
        AppError::Config(e.to_string())
    }
}

pub type AppResult<T> = Result<T, AppError>;
