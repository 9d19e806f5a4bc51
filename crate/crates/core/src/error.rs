use thiserror::Error;

/// Errors produced by the closed-form engine, the oracle and the model loader.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("scale mismatch: expected {expected}, found {found}")]
    ScaleMismatch { expected: f64, found: f64 },

    #[error("cannot rescale from {from} down to {to}; the target scale must not be smaller")]
    RescaleDirection { from: f64, to: f64 },

    #[error("weight vector needs more than {cap} components to reach the truncation tolerance")]
    TruncationCap { cap: usize },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("inadmissible model: {0}")]
    Inadmissible(String),

    #[error("invalid reinsurance program: {0}")]
    InvalidProgram(String),

    #[error("numerical quality: {quantity} = {value:e} strays outside [0, 1] by more than the clamp tolerance")]
    NumericalQuality { quantity: &'static str, value: f64 },

    #[error("empty sample batch")]
    EmptyBatch,

    #[error("{0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
