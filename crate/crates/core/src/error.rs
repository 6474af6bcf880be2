use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("point {z} lies outside the open unit disk")]
    OutsideDisk { z: Complex64 },

    #[error("denominator vanishes at z = {z} (|den| = {magnitude:e})")]
    VanishingDenominator { z: Complex64, magnitude: f64 },

    #[error("summation did not converge within {order} terms (last term {last_term:e}, partial sum {partial:e})")]
    NonConvergence { order: usize, last_term: f64, partial: f64 },

    #[error("series tail too large for verification: |a_N| r^N = {tail:e} at N = {order}")]
    TailTooLarge { order: usize, tail: f64 },

    #[error("criterion {criterion} requires R^tau parameters")]
    MissingRTau { criterion: &'static str },

    #[error("margin is not monotone in q: {detail}")]
    NonMonotone { detail: String },

    #[error("margin undetermined at q = {q}: {reason}")]
    Undetermined { q: f64, reason: String },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }

    /// Short stable tag used in machine-readable error lines.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidParameter { .. } => "invalid_parameter",
            Error::OutsideDisk { .. } => "outside_disk",
            Error::VanishingDenominator { .. } => "vanishing_denominator",
            Error::NonConvergence { .. } => "non_convergence",
            Error::TailTooLarge { .. } => "tail_too_large",
            Error::MissingRTau { .. } => "missing_rtau",
            Error::NonMonotone { .. } => "non_monotone",
            Error::Undetermined { .. } => "undetermined",
        }
    }
}
