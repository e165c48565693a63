use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("ill-conditioned geometry: {0}")]
    IllConditioned(String),

    #[error("quadrature did not converge on ({a}, {b}): last change {change:.3e} with {nodes} nodes per panel")]
    QuadratureNotConverged { a: f64, b: f64, change: f64, nodes: usize },

    #[error("theta series needs more than {max_terms} terms (term bound {bound:.3e})")]
    ThetaTruncation { max_terms: usize, bound: f64 },

    #[error("theta evaluation overflowed at z = {re} + {im}i")]
    ThetaOverflow { re: f64, im: f64 },

    #[error("invalid modulus: {0}")]
    InvalidModulus(String),

    #[error("ambiguous regime: {0}")]
    AmbiguousRegime(String),

    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
