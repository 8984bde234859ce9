use thiserror::Error;

#[derive(Debug, Error)]
pub enum MkgError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("dimension mismatch: expected {expected} values, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("grid mismatch between operands")]
    GridMismatch,

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("multiplier {0} is a space-time symbol and cannot act on a spatial field")]
    SpaceTimeSymbol(&'static str),

    #[error("invalid index {index} for dimension {dim}")]
    InvalidIndex { index: usize, dim: usize },

    #[error("Faraday seed violates the Bianchi identity (residual {residual:.3e} > {tolerance:.1e})")]
    BianchiViolation { residual: f64, tolerance: f64 },

    #[error("blow-up at t = {t}: {reason}")]
    BlowUp { t: f64, reason: String },

    #[error("invalid scheme: {0}")]
    InvalidScheme(String),

    #[error("invalid probe configuration: {0}")]
    InvalidProbe(String),

    #[error("snapshot format: {0}")]
    Snapshot(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = MkgError> = std::result::Result<T, E>;

/// Non-fatal conditions reported alongside a result.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub enum Warning {
    /// A negative power of `D` (or a homogeneous norm) discarded a non-negligible mean.
    MeanDropped { magnitude: f64 },
}
