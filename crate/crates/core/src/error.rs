use thiserror::Error;

/// Errors raised by the risk and optimization routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("probability must lie strictly inside (0, 1), got {0}")]
    Probability(f64),

    #[error("{what}: argument {value} is outside the domain {domain}")]
    Domain {
        what: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("{routine} did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence {
        routine: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("covariance matrix is not symmetric: {0}")]
    NotSymmetric(String),

    #[error("covariance matrix is not positive definite: {0}")]
    NotPositiveDefinite(String),

    #[error("invalid weights: {0}")]
    InvalidWeights(String),

    #[error("insufficient tail mass: n*u = {tail_points} but at least 100 tail points are required")]
    InsufficientTail { tail_points: f64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(what: &'static str, value: f64, domain: &'static str) -> Error {
    Error::Domain {
        what,
        value,
        domain,
    }
}
