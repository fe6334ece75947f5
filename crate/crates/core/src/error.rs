use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("polygamma evaluated at a pole: z = {re} + {im}i")]
    PoleInput { re: f64, im: f64 },
    #[error("quadrature did not converge: estimated error {estimate:e} exceeds tolerance {tol:e}")]
    NonConvergence { estimate: f64, tol: f64 },
    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),
    #[error("gradient requested inside the pole guard band (theta = {theta})")]
    PoleEvaluation { theta: f64 },
    #[error("invalid family specification: {0}")]
    InvalidFamily(String),
    #[error("family is not orthonormal: Gram residual {residual:e}")]
    OrthonormalityViolation { residual: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
