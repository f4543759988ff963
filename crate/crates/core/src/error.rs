use thiserror::Error;

/// Errors raised by the numerical laboratory.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("grid size {0} must be a power of two no smaller than 16")]
    BadGridSize(usize),
    #[error("box length {0} must be positive and finite")]
    BadBoxLength(f64),
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("expected {expected} samples, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("non-finite value at index {0}")]
    NonFinite(usize),
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("time index {index} outside 0..={max}")]
    TimeIndexOutOfRange { index: usize, max: usize },
    #[error("Picard iteration did not converge after {iterations} iterations (contraction ratio {ratio:.3e})")]
    NonConvergence { iterations: usize, ratio: f64 },
    #[error("no horizon converged after {halvings} halvings (smallest tried T = {last_horizon:.3e})")]
    HorizonExhausted { halvings: u32, last_horizon: f64 },
    #[error("blow-up guard tripped at t = {time:.6}: sup norm grew from {initial:.3e} to {current:.3e}")]
    BlowUp { time: f64, initial: f64, current: f64 },
}

impl Error {
    /// Variant name, stable across releases; used in run manifests.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::BadGridSize(_) => "BadGridSize",
            Error::BadBoxLength(_) => "BadBoxLength",
            Error::GridMismatch => "GridMismatch",
            Error::LengthMismatch { .. } => "LengthMismatch",
            Error::NonFinite(_) => "NonFinite",
            Error::InvalidParameter { .. } => "InvalidParameter",
            Error::TimeIndexOutOfRange { .. } => "TimeIndexOutOfRange",
            Error::NonConvergence { .. } => "NonConvergence",
            Error::HorizonExhausted { .. } => "HorizonExhausted",
            Error::BlowUp { .. } => "BlowUp",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
