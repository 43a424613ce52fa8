use thiserror::Error;

/// Errors produced by the synthesis and simulation pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("operator sum is not a scalar multiple of the identity (deviation {deviation:.3e})")]
    NotScalarMultiple { deviation: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("anholonomic constraint violated: residuals {residuals:?} exceed {tol:e}")]
    ConstraintViolation { residuals: [f64; 3], tol: f64 },

    #[error("no endpoint solution: {reason} (residuals {residuals:?})")]
    NoSolution { reason: String, residuals: Vec<f64> },

    #[error("profile integrates to {integral} but the endpoint requires {expected}")]
    ProfileMismatch { integral: f64, expected: f64 },

    #[error("tan(phi_beta) diverges: |cos phi_beta| = {cos_phi_beta:.3e}")]
    TanSingularity { cos_phi_beta: f64 },

    #[error("schedule contains non-finite values or non-increasing times at row {row}")]
    NonFiniteSchedule { row: usize },

    #[error("state norm {norm} differs from 1")]
    NotNormalized { norm: f64 },

    #[error("|<{which}|psi>| = {amplitude:.3e} is too small to define a GHZ phase")]
    AmplitudeTooSmall { which: &'static str, amplitude: f64 },

    #[error("schedule has zero squared pulse area")]
    ZeroArea,

    #[error("division by zero in detuning formula ({0})")]
    DivisionByZero(&'static str),

    #[error("energy-scale hierarchy violated: minimum ratio {min_ratio:.3} < required {required}")]
    HierarchyViolation { min_ratio: f64, required: f64 },

    #[error("integration did not converge: last change {last_change:.3e} after {steps} steps")]
    NotConverged { last_change: f64, steps: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("schedule I/O: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
