use thiserror::Error;

pub type Result<T> = std::result::Result<T, QfiltError>;

#[derive(Debug, Error)]
pub enum QfiltError {
    /// Every weight was zero (or non-finite); the caller decides the fallback.
    #[error("degenerate weights: total mass is zero or not finite")]
    DegenerateWeights,

    #[error("invalid measurement model: {0}")]
    InvalidModel(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("observation {step} has zero likelihood under every grid cell")]
    ImpossibleObservation { step: usize },

    #[error("log-log fit undefined: {usable} usable points, need at least 3")]
    UndefinedFit { usable: usize },

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("trajectory failed after {attempts} attempts: {reason}")]
    TrajectoryFailed { attempts: usize, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("config parse error: {0}")]
    Parse(String),
}
