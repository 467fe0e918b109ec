use thiserror::Error;

use crate::lp::SolverError;
use crate::systems::plugin::PluginError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid safe set: {0}")]
    InvalidSet(String),

    #[error("rejection sampling of {what} gave up after {attempts} attempts")]
    RejectionCap { what: &'static str, attempts: usize },

    #[error("invalid disturbance distribution: {0}")]
    InvalidDistribution(String),

    #[error("unknown system `{0}`")]
    UnknownSystem(String),

    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParam { field: &'static str, reason: String },

    #[error("invalid basis configuration: {0}")]
    InvalidBasis(String),

    #[error("sample set is empty")]
    EmptySamples,

    #[error("state lies outside the safe set")]
    OutsideSafeSet,

    #[error("non-finite value produced by `{0}`")]
    NonFinite(String),

    #[error("certificate: {0}")]
    Certificate(String),

    #[error(transparent)]
    Plugin(#[from] PluginError),

    #[error(transparent)]
    Solver(#[from] SolverError),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn param(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParam {
            field,
            reason: reason.into(),
        }
    }
}

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}
