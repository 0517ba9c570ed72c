use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Argument outside the domain where the function is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// Result is too large to represent (e.g. approaching a pole).
    #[error("overflow: {0}")]
    Overflow(String),

    /// The interference field is not summable (path-loss exponent ≤ 2).
    #[error("divergent interference: alpha = {alpha} must exceed 2")]
    Divergence { alpha: f64 },

    /// Adaptive quadrature hit its subdivision limit.
    #[error("quadrature did not converge: estimate {estimate:e}, error bound {error_bound:e}")]
    Quadrature { estimate: f64, error_bound: f64 },

    /// An operation was called with a model it does not support.
    #[error("contract violation: {0}")]
    Contract(String),

    /// A parameter violates its invariant.
    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParam(msg.into())
    }
}
