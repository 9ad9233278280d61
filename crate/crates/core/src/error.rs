use thiserror::Error;

/// Errors raised by the numerical and physical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("numerical integration did not converge: {0}")]
    NonConvergence(String),

    #[error("hypergeometric series hits a pole at term {0}")]
    HypergeometricPole(usize),

    #[error("hypergeometric series does not terminate")]
    NonTerminating,

    #[error("splitting phase undefined: transmittance vanishes")]
    DegeneratePhase,

    #[error("JSA is not exchange-symmetric: {0}")]
    NonSymmetricJsa(String),

    #[error("HOM curve lacks a sample at {0}")]
    IncompleteCurve(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
