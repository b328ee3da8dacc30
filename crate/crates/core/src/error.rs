use thiserror::Error;

use crate::solver::SolverTrace;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid initialization: {0}")]
    InvalidInitialization(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid contour: {0}")]
    InvalidContour(String),

    #[error("invalid landscape: {0}")]
    InvalidLandscape(String),

    #[error("dimension mismatch: expected {expected_h}x{expected_w}, got {got_h}x{got_w}")]
    DimensionMismatch {
        expected_h: usize,
        expected_w: usize,
        got_h: usize,
        got_w: usize,
    },

    #[error("sample '{id}': {reason}")]
    Sample { id: String, reason: String },

    #[error("degenerate shape: {0}")]
    DegenerateShape(String),

    #[error("invalid shape: {0}")]
    InvalidShape(String),

    #[error("malformed {format} data: {reason}")]
    Format { format: &'static str, reason: String },

    /// The solver produced a non-finite energy or radius. The trace up to and
    /// including the failing iteration is kept for inspection.
    #[error("numerical failure at iteration {iteration}: {reason}")]
    NumericalFailure {
        iteration: usize,
        reason: String,
        trace: Box<SolverTrace>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn format(format: &'static str, reason: impl Into<String>) -> Self {
        Error::Format {
            format,
            reason: reason.into(),
        }
    }
}
