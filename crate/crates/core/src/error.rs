use thiserror::Error;

/// Errors raised by the simulation library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch in {op}: {left} vs {right}")]
    DimensionMismatch {
        op: &'static str,
        left: usize,
        right: usize,
    },

    #[error("matrix of dimension {dim} needs {expected} entries, got {got}")]
    BadShape { dim: usize, expected: usize, got: usize },

    #[error("matrix contains a non-finite entry")]
    NonFinite,

    #[error("matrix is not Hermitian (max |A - A^dag| = {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("invalid time interval: end {end} precedes start {start}")]
    InvalidInterval { start: f64, end: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("Kraus count mismatch for channel {channel}: late slot has {late}, early slot has {early}")]
    KrausCountMismatch { channel: u8, late: usize, early: usize },

    #[error("post-selection impossible: branch probability {prob:e} is below 1e-14")]
    PostSelectionImpossible { prob: f64 },

    #[error("trajectory needs at least two points, got {0}")]
    TrajectoryTooShort(usize),

    #[error("map is not completely positive: {0}")]
    NotCompletelyPositive(String),

    #[error("I/O failure on {path}: {message}")]
    Io { path: String, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
