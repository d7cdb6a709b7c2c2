use thiserror::Error;

use crate::fejer::{FejerFactor, WilsonReport};
use crate::targets::AccessibilityCell;

#[derive(Debug, Error)]
pub enum Error {
    #[error("grid of {points} points is too coarse for degree {degree} (need at least {required})")]
    GridTooCoarse {
        points: usize,
        degree: usize,
        required: usize,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("argument outside supported range: {0}")]
    RangeUnsupported(String),

    /// The coefficient list of the requested target is not representable in binary64.
    #[error("coefficients overflow binary64 (max log10 |c| = {:.2})", cell.max_log10_coeff)]
    CoefficientOverflow { cell: Box<AccessibilityCell> },

    #[error("non-finite coefficient produced while building {0}")]
    NonFiniteCoefficient(String),

    #[error("singular matrix: pivot {pivot:e} at column {column}")]
    SingularMatrix { column: usize, pivot: f64 },

    /// Carries the best iterate found so the caller can inspect it.
    #[error("Wilson iteration did not converge after {} iterations (residual {:e})", report.iterations, report.residual_linf)]
    NoConvergence {
        best: FejerFactor,
        report: WilsonReport,
    },

    #[error("polynomial is negative on the unit circle (min {min:e}, tolerance {tol:e})")]
    NegativeInstance { min: f64, tol: f64 },

    #[error("A^2 + B^2 exceeds one on the unit circle (max {max:e})")]
    NotCompletable { max: f64 },

    #[error("matrix polynomial is not unitary on the circle (deviation {0:e})")]
    NotUnitary(f64),

    #[error("leading coefficient norm {norm:e} below threshold {threshold:e} at step {step}")]
    LeadTooSmall {
        step: usize,
        norm: f64,
        threshold: f64,
    },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
