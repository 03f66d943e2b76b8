use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error("secant pole reachable: |phi_dc| + |phi_rf| = {sum} must stay below pi/2")]
    SecantPole { sum: f64 },

    #[error("{samples} quadrature samples is below the sampling floor {floor} for order {order}")]
    SamplingFloor { samples: usize, order: usize, floor: usize },

    #[error("eigen-solver failure: {0}")]
    EigenSolver(String),

    #[error("eigenvector matrix condition {condition:.3e} exceeds bound {bound:.3e}")]
    NearDefective { condition: f64, bound: f64 },

    #[error("singular matching system ({details})")]
    SingularSystem { details: String },

    #[error("no convergence up to truncation {truncation}: last relative change {change:.3e}")]
    NotConverged { truncation: usize, change: f64 },

    #[error("courant condition violated: number {courant:.4} exceeds {limit:.4}")]
    Courant { courant: f64, limit: f64 },

    #[error("insufficient steady-state window: {0}")]
    SteadyState(String),

    #[error("step-size guard: dt * |H| = {product:.3e} exceeds {limit:.3e}")]
    StepSize { product: f64, limit: f64 },

    #[error("norm drift {drift:.3e} at t = {time:.6e} s")]
    NormDrift { drift: f64, time: f64 },

    #[error("dimension overflow: {qubits} qubits exceed the full Hilbert cap of {cap}")]
    DimensionOverflow { qubits: usize, cap: usize },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("empty harmonic spectrum")]
    EmptySpectrum,

    #[error("monochromatic graph has no coupled pairs")]
    NoMonochromaticPairs,

    #[error("search budget exhausted without a feasible evaluation")]
    NoFeasibleEvaluation,
}

impl Error {
    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field,
            reason: reason.into(),
        }
    }

    /// True for errors raised while checking inputs, before any numerics ran.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter { .. }
                | Error::SecantPole { .. }
                | Error::SamplingFloor { .. }
                | Error::Courant { .. }
                | Error::DimensionOverflow { .. }
                | Error::DimensionMismatch { .. }
                | Error::InvalidDensityMatrix(_)
                | Error::EmptySpectrum
                | Error::NoMonochromaticPairs
        )
    }
}

pub(crate) fn ensure_finite(field: &'static str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(field, format!("must be finite, got {value}")))
    }
}
