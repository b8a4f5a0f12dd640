use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("instance too large for exact enumeration: {what} = {got} exceeds cap {cap}")]
    Capacity {
        what: &'static str,
        got: usize,
        cap: usize,
    },

    #[error("root finding did not converge after {iterations} iterations: bracket [{lo}, {hi}], residual {residual:e}")]
    NoConvergence {
        iterations: usize,
        lo: f64,
        hi: f64,
        residual: f64,
    },

    #[error("invalid configuration: {field}: {reason}")]
    Config { field: String, reason: String },
}

pub type Result<T> = std::result::Result<T, ModelError>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(ModelError::Domain(msg.into()))
}
