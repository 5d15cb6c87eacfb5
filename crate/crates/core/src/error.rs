use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("quadrature did not converge: error estimate {estimate:e} exceeds target {target:e}")]
    NonConvergence { estimate: f64, target: f64 },

    #[error("evaluation point {omega} lies at or beyond the integration cutoff {cutoff}")]
    InvalidCutoff { omega: f64, cutoff: f64 },

    #[error("I(0) diverges: J(ω)/ω is not integrable at ω = 0")]
    DivergentI0,

    #[error("principal value at ω = {omega} diverges: density is discontinuous or non-integrable there")]
    DivergentPrincipalValue { omega: f64 },

    #[error("NoSolution: {reason}")]
    NoSolution { reason: String },

    #[error("Hilbert space dimension {dimension} exceeds budget {budget}")]
    DimensionBudgetExceeded { dimension: u128, budget: usize },

    #[error("propagator accuracy target {target:e} not met after {halvings} step halvings (last change {change:e})")]
    StepControlFailure { target: f64, halvings: u32, change: f64 },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }

    /// True for failures of a numerical procedure, as opposed to rejected input.
    pub fn is_numerical(&self) -> bool {
        !matches!(self, Error::InvalidParameter { .. } | Error::DimensionBudgetExceeded { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
