use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A constructor or operation received a value outside its admissible range.
    #[error("invalid parameter `{name}`: {constraint}")]
    InvalidParameter {
        name: &'static str,
        constraint: String,
    },

    /// The Lambert W function is undefined (or has no real value) at this point.
    #[error("lambert W domain error on branch {branch} at z = {z}: {reason}")]
    Domain {
        branch: i32,
        z: Complex64,
        reason: &'static str,
    },

    #[error(
        "lambert W did not converge on branch {branch} at z = {z}: \
         residual {residual:e} after {iterations} iterations (last iterate {last})"
    )]
    NoConvergence {
        branch: i32,
        z: Complex64,
        last: Complex64,
        residual: f64,
        iterations: usize,
    },

    /// Failure while computing the spectrum or trajectory of one spatial mode.
    #[error("mode n = {n}: {source}")]
    Mode {
        n: u64,
        #[source]
        source: Box<Error>,
    },

    /// Two routes that must agree did not. Indicates a bug, not bad input.
    #[error("internal consistency check failed: {0}")]
    Inconsistent(String),

    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    #[error("invalid solver state: {0}")]
    State(String),

    #[error("unsupported: {0}")]
    Unsupported(String),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, constraint: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            constraint: constraint.into(),
        }
    }

    pub(crate) fn in_mode(self, n: u64) -> Self {
        Error::Mode {
            n,
            source: Box::new(self),
        }
    }
}
