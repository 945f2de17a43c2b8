use thiserror::Error;

/// Errors raised by the rotor model, field synthesis, propagation and design routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid quantum numbers: J={j}, J'={j_prime}, M={m}")]
    QuantumNumbers { j: i64, j_prime: i64, m: i64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("wave packet is not normalized (|c|^2 = {norm_sqr:.3e})")]
    NotNormalized { norm_sqr: f64 },

    #[error("quadrature did not converge: relative change {relative_change:.3e} after {steps} steps")]
    QuadratureNotConverged { steps: usize, relative_change: f64 },

    #[error("norm drift {drift:.3e} exceeds tolerance {tolerance:.3e} (dt = {dt:.4e}, {steps} steps)")]
    NormDrift {
        drift: f64,
        tolerance: f64,
        dt: f64,
        steps: usize,
    },

    #[error("phase undefined: {0}")]
    UndefinedPhase(&'static str),

    #[error("internal consistency failure: {0}")]
    Consistency(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
