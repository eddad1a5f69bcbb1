use alloc::string::String;

use thiserror::Error;

use crate::field::DiscreteField;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("t = {t} lies outside the domain [{lo}, {hi}]")]
    Domain { t: f64, lo: f64, hi: f64 },

    #[error("operation not supported for this manifold variant: {0}")]
    UnsupportedVariant(&'static str),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("convergence of the end integral cannot be decided without tail asymptotics")]
    NeedsAsymptotics,

    #[error("singular operator: {0}")]
    Singularity(String),

    #[error("Newton did not converge: residual {residual:e} after {iterations} iterations (eps = {eps:e})")]
    NonConvergence {
        eps: f64,
        iterations: usize,
        residual: f64,
        best: alloc::boxed::Box<DiscreteField>,
    },

    #[error("no two-end barrier: the {0} end is p-parabolic")]
    NoBarrier(&'static str),

    #[error("constants infeasible: C = {c} must be positive")]
    ConstantsInfeasible { c: f64 },

    #[error("curvature hypothesis violated: {0}")]
    CurvatureHypothesis(String),

    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),

    #[error("no data: every node was excluded")]
    NoData,

    #[error("quadrature failed to reach tolerance: estimate {value}, error {abs_error:e}")]
    Quadrature { value: f64, abs_error: f64 },
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
