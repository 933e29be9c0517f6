use thiserror::Error;

/// Errors surfaced by the simulator and the strategies.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("no eligible relay (every relay has a depleted battery)")]
    NoEligibleRelay,

    #[error("relay {0} has a depleted battery and cannot forward")]
    DepletedRelay(usize),

    #[error("network depleted at frame {frame}: no eligible relay")]
    NetworkDepleted { frame: u64 },

    #[error("non-finite value during training: {0}")]
    Divergence(String),

    #[error("checkpoint shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
