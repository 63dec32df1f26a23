use thiserror::Error;

pub type Result<T> = std::result::Result<T, KerrError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KerrError {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error(
        "Fock cutoff n_max = {n_max} too small for mean photon number {mean}: \
         Poisson tail {tail:e} is not below {tail_tol:e}"
    )]
    DimensionTooSmall {
        n_max: usize,
        mean: f64,
        tail: f64,
        tail_tol: f64,
    },

    #[error("Fock cutoff n_max = {required} exceeds the configured cap {cap}")]
    DimensionCapExceeded { required: usize, cap: usize },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("eigensolver failed: {0}")]
    Eigensolver(String),

    #[error(
        "RK4 integration did not converge: doubling {steps} steps changed an element by {max_change:e} \
         (tolerance {tolerance:e})"
    )]
    NotConverged {
        steps: usize,
        max_change: f64,
        tolerance: f64,
    },
}

impl KerrError {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        KerrError::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

pub(crate) fn ensure_finite(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(KerrError::invalid(
            name,
            format!("must be finite, got {value}"),
        ))
    }
}
