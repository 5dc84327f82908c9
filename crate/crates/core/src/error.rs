use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument fell outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A log-domain value was too large to convert to a native float.
    #[error("overflow converting log-domain value {log_value} to linear scale")]
    Overflow { log_value: f64 },

    /// A log-domain value was too small to convert to a native float.
    #[error("underflow converting log-domain value {log_value} to linear scale")]
    Underflow { log_value: f64 },

    /// A bracketing root search found no sign change.
    #[error("no root in [{lo}, {hi}]: f(lo) = {f_lo}, f(hi) = {f_hi}")]
    NoRoot { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    /// The requested equation has no solution in the admissible region.
    #[error("infeasible: {0}")]
    Infeasible(String),

    /// A computation would exceed a configured resource guard.
    #[error("resource limit: {0}")]
    Resource(String),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn infeasible(msg: impl Into<String>) -> Self {
        Error::Infeasible(msg.into())
    }
}
