use std::path::PathBuf;

use activerays::Error as CoreError;
use thiserror::Error;

/// Process exit codes.
pub mod code {
    pub const FAILURE: i32 = 1;
    pub const INPUT: i32 = 2;
    pub const SHAPE: i32 = 3;
    pub const NUMERICAL: i32 = 4;
    pub const PAIRING: i32 = 5;
    pub const DIMENSIONS: i32 = 6;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("{path}: {reason}")]
    Parse { path: PathBuf, reason: String },

    #[error("{0}")]
    Usage(String),

    #[error("{0}")]
    Shape(CoreError),

    #[error("{0}")]
    Numerical(CoreError),

    #[error("{0}")]
    Pairing(String),

    #[error("{0}")]
    Dimensions(String),

    #[error("{0}")]
    Core(CoreError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Read { .. } | CliError::Parse { .. } | CliError::Usage(_) => code::INPUT,
            CliError::Shape(_) => code::SHAPE,
            CliError::Numerical(_) => code::NUMERICAL,
            CliError::Pairing(_) => code::PAIRING,
            CliError::Dimensions(_) => code::DIMENSIONS,
            CliError::Write { .. } | CliError::Core(_) => code::FAILURE,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::DegenerateShape(_) | CoreError::InvalidShape(_) => CliError::Shape(e),
            CoreError::NumericalFailure { .. } => CliError::Numerical(e),
            CoreError::Sample { .. } => CliError::Pairing(e.to_string()),
            CoreError::DimensionMismatch { .. } => CliError::Dimensions(e.to_string()),
            CoreError::InvalidInitialization(_)
            | CoreError::InvalidArgument(_)
            | CoreError::InvalidContour(_) => CliError::Usage(e.to_string()),
            other => CliError::Core(other),
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
