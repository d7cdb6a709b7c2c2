//! Target polynomials, truncation degrees and the coefficient accessibility analysis.

mod accessibility;
mod hs;
mod inverse;
mod random;
mod sign;
mod threshold;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::laurent::{theta_grid, LaurentPolynomial};

pub use accessibility::{
    accessibility_csv, accessibility_map, erf_cell, inverse_cell, matrix_inversion_cell, rect_cell, sign_cell, threshold_cell,
    AccessibilityCell, AccessibilityFamily, ACCESSIBILITY_CSV_HEADER, LOG10_F64_MAX, RECT_T,
};
pub use hs::{build_hamiltonian_sim, truncation_hs};
pub use inverse::{
    build_inverse, build_matrix_inversion, eps_rect, inverse_chebyshev, inverse_params, matrix_inversion_chebyshev,
    matrix_inversion_degree_formula, InverseParams, MatrixInversionSeries,
};
pub use random::{build_random, random_nonzeros};
pub use sign::{
    build_erf, build_rect, build_sign, erf_chebyshev, erf_degree, n_exp, rect_polynomial, sign_params, sign_polynomial,
    RectPolynomial, SignPolynomial,
};
pub use threshold::{build_threshold, threshold_k, ThresholdPolynomial};

/// Tolerance for the reciprocity and real-on-circle checks of a target pair.
pub const CLASS_TOL: f64 = 1e-12;
/// Slack on the sampled bound `A^2 + B^2 <= 1`.
pub const BOUND_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Hs,
    Random,
    Threshold,
    Rect,
    Sign,
    Erf,
    Inverse,
    MatrixInversion,
    /// Pairs supplied directly by the caller.
    Custom,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Hs => "hs",
            Family::Random => "random",
            Family::Threshold => "threshold",
            Family::Rect => "rect",
            Family::Sign => "sign",
            Family::Erf => "erf",
            Family::Inverse => "inverse",
            Family::MatrixInversion => "matrix_inversion",
            Family::Custom => "custom",
        }
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetMeta {
    pub family: Family,
    pub tau: Option<f64>,
    pub eps_approx: Option<f64>,
    pub kappa: Option<f64>,
    pub delta: Option<f64>,
    pub t: Option<f64>,
    pub a: Option<f64>,
    pub seed: Option<u64>,
    pub subnormalization: f64,
}

impl TargetMeta {
    pub fn new(family: Family, subnormalization: f64) -> Self {
        Self {
            family,
            tau: None,
            eps_approx: None,
            kappa: None,
            delta: None,
            t: None,
            a: None,
            seed: None,
            subnormalization,
        }
    }

    fn validate(&self) -> Result<()> {
        if let Some(e) = self.eps_approx {
            if !(e > 0.0) {
                return Err(Error::Invalid(format!("eps_approx must be positive, got {e}")));
            }
        }
        if !(self.subnormalization > 0.0 && self.subnormalization <= 1.0) {
            return Err(Error::Invalid(format!(
                "subnormalization must lie in (0, 1], got {}",
                self.subnormalization
            )));
        }
        Ok(())
    }
}

/// A validated pair `(A, B)` with `P = A + iB`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PairRepr", into = "PairRepr")]
pub struct TargetPair {
    a: LaurentPolynomial,
    b: LaurentPolynomial,
    meta: TargetMeta,
}

#[derive(Serialize, Deserialize)]
struct PairRepr {
    #[serde(rename = "A")]
    a: LaurentPolynomial,
    #[serde(rename = "B")]
    b: LaurentPolynomial,
    meta: TargetMeta,
}

impl TryFrom<PairRepr> for TargetPair {
    type Error = Error;
    fn try_from(r: PairRepr) -> Result<Self> {
        TargetPair::new(r.a, r.b, r.meta)
    }
}

impl From<TargetPair> for PairRepr {
    fn from(p: TargetPair) -> Self {
        PairRepr { a: p.a, b: p.b, meta: p.meta }
    }
}

/// Whether `p` is real on the circle with definite reciprocity.
fn is_pure(p: &LaurentPolynomial) -> bool {
    let r = p.classify(CLASS_TOL);
    r.is_real_on_circle && (r.is_reciprocal || r.is_anti_reciprocal)
}

impl TargetPair {
    /// Pads both components to a common degree and checks the invariants: each of `A`, `B` is
    /// real on the circle with definite reciprocity, and `A^2 + B^2 <= 1` on a sample grid.
    pub fn new(a: LaurentPolynomial, b: LaurentPolynomial, meta: TargetMeta) -> Result<Self> {
        meta.validate()?;
        let n = a.degree().max(b.degree());
        let (a, b) = (a.padded(n), b.padded(n));
        for (name, p) in [("A", &a), ("B", &b)] {
            if p.coeffs().iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
                return Err(Error::NonFiniteCoefficient(format!("{} target component {name}", meta.family)));
            }
            if !is_pure(p) {
                return Err(Error::Invalid(format!(
                    "{name} must be real on the circle with definite reciprocity"
                )));
            }
        }
        let pair = Self { a, b, meta };
        let max = pair.sampled_norm_sq_max(8 * (n + 1));
        if max > 1.0 + BOUND_SLACK {
            return Err(Error::NotCompletable { max });
        }
        Ok(pair)
    }

    pub fn a(&self) -> &LaurentPolynomial {
        &self.a
    }

    pub fn b(&self) -> &LaurentPolynomial {
        &self.b
    }

    pub fn meta(&self) -> &TargetMeta {
        &self.meta
    }

    pub fn degree(&self) -> usize {
        self.a.degree()
    }

    pub fn into_parts(self) -> (LaurentPolynomial, LaurentPolynomial, TargetMeta) {
        (self.a, self.b, self.meta)
    }

    /// `A(e^{iθ}) + i B(e^{iθ})`, using the real parts of both components.
    pub fn value(&self, theta: f64) -> Complex64 {
        Complex64::new(self.a.eval_on_circle(theta).re, self.b.eval_on_circle(theta).re)
    }

    /// `max_θ A^2 + B^2` on `points` uniform samples.
    pub fn sampled_norm_sq_max(&self, points: usize) -> f64 {
        theta_grid(points).map(|t| self.value(t).norm_sqr()).fold(0.0, f64::max)
    }
}
