use thiserror::Error;

/// Errors raised by the ball, calculus and diagnostics layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A point (or probe) lies outside the open unit ball.
    #[error("domain error: {what} has norm {norm} (must be < 1)")]
    OutsideBall { what: &'static str, norm: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("non-finite value in {what}")]
    NonFinite { what: &'static str },

    /// A function or map produced a non-finite value; carries the offending point.
    #[error("evaluation of {label} is non-finite at {point:?}")]
    Evaluation { label: String, point: Vec<(f64, f64)> },

    #[error("parameter {name} = {value} outside {range}")]
    Parameter {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("index {index} out of range 0..{len}")]
    Index { index: usize, len: usize },

    /// A symbol specification violates one of its family invariants.
    #[error("invalid symbol spec ({family}): {reason}")]
    InvalidSpec { family: String, reason: String },

    #[error("degenerate configuration: {0}")]
    Degenerate(String),
}

pub type Result<T> = std::result::Result<T, Error>;
