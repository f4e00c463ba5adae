use thiserror::Error;

/// Errors raised by the model, its operators and the time integrator.
#[derive(Debug, Error)]
pub enum IkError {
    #[error("field contains non-finite values")]
    NonFiniteField,

    #[error("invalid exponent list: {0}")]
    BadExponents(String),

    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("water depth collapsed: min depth {min_depth:e}")]
    DepthCollapse { min_depth: f64 },

    #[error(
        "elliptic solve did not converge after {iterations} iterations (last relative residual {last:e})"
    )]
    EllipticNoConverge {
        iterations: usize,
        last: f64,
        history: Vec<f64>,
    },

    #[error("Pade matching system is singular or inaccurate (residual {residual:e})")]
    PadeDegenerate { residual: f64 },

    #[error("curves coincide to rounding; no scaling exponent can be fitted")]
    ExactMatch,

    #[error("sign condition violated: min a = {min_a:e} below threshold {threshold:e}")]
    SignCondition { min_a: f64, threshold: f64 },

    #[error("time step {dt:e} exceeds the stability bound {limit:e}")]
    CflViolation { dt: f64, limit: f64 },

    #[error("algebraic identity violated: {what} (defect {defect:e})")]
    IdentityViolation { what: &'static str, defect: f64 },

    #[error("malformed snapshot: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = IkError> = std::result::Result<T, E>;
