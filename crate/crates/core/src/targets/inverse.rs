//! `1/x` on `[-1, -1/κ) ∪ (1/κ, 1]` and the matrix-inversion target built from it.

use std::f64::consts::{PI, SQRT_2};

use crate::chebyshev;
use crate::error::{domain, Error, Result};
use crate::laurent::LaurentPolynomial;

use super::accessibility::{inverse_cell, matrix_inversion_cell};
use super::sign::{n_exp, rect_inner, RectPolynomial};
use super::{Family, TargetMeta, TargetPair};

/// Sample count used to bound the sup norm of the composed series on `[-1, 1]`.
const SUP_SAMPLES: usize = 4001;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InverseParams {
    /// `b = ⌈κ² ln(κ/ε)⌉`.
    pub b: usize,
    /// `j_0 = ⌈sqrt(b ln(4b/ε))⌉`.
    pub j0: usize,
}

pub fn inverse_params(kappa: f64, eps: f64) -> Result<InverseParams> {
    if !(kappa > 1.0) || !(eps > 0.0 && eps < 1.0) {
        return domain(format!("inverse needs kappa > 1 and 0 < eps < 1 (got kappa={kappa}, eps={eps})"));
    }
    let b = (kappa * kappa * (kappa / eps).ln()).ceil() as usize;
    let j0 = ((b as f64) * (4.0 * b as f64 / eps).ln()).sqrt().ceil() as usize;
    Ok(InverseParams { b, j0 })
}

/// `ln(C(2b, b) / 4^b)`: exact product for small `b`, asymptotic series beyond.
fn ln_central_binomial_ratio(b: usize) -> f64 {
    if b <= 64 {
        let mut p = 1.0;
        for i in 1..=b {
            p *= (2 * i - 1) as f64 / (2 * i) as f64;
        }
        return p.ln();
    }
    let n = b as f64;
    -0.5 * (PI * n).ln() - 1.0 / (8.0 * n) + 1.0 / (192.0 * n.powi(3)) - 1.0 / (640.0 * n.powi(5))
}

/// `sum_{i=j+1}^{b} C(2b, b+i) / 2^{2b}` for `j = 0..=j0`.
///
/// Terms are formed in log space from the central term by the ratio `(b-i)/(b+i+1)`, then
/// accumulated from the smallest upward with Neumaier compensation, so the tails stay accurate
/// even when `2^{2b}` is far outside binary64.
pub(crate) fn binomial_tails(b: usize, j0: usize) -> Vec<f64> {
    let mut ln_terms = Vec::with_capacity(b + 1);
    let mut acc = ln_central_binomial_ratio(b);
    ln_terms.push(acc);
    for i in 0..b {
        acc += ((b - i) as f64).ln() - ((b + i + 1) as f64).ln();
        ln_terms.push(acc);
    }
    let mut tails = vec![0.0; j0 + 1];
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for i in (1..=b).rev() {
        let t = ln_terms[i].exp();
        let s = sum + t;
        comp += if sum.abs() >= t.abs() { (sum - s) + t } else { (t - s) + sum };
        sum = s;
        // sum now covers i..=b, which is the tail for j = i - 1
        if i - 1 <= j0 {
            tails[i - 1] = sum + comp;
        }
    }
    tails
}

/// Chebyshev coefficients of `P_{1/x}`: `4 (-1)^j tail_j` on `T_{2j+1}`, `j = 0..=j0`.
pub fn inverse_chebyshev(kappa: f64, eps: f64) -> Result<Vec<f64>> {
    let p = inverse_params(kappa, eps)?;
    let tails = binomial_tails(p.b, p.j0);
    let mut c = vec![0.0; 2 * p.j0 + 2];
    for (j, t) in tails.iter().enumerate() {
        let sign = if j % 2 == 0 { 4.0 } else { -4.0 };
        c[2 * j + 1] = sign * t;
    }
    Ok(c)
}

fn scaled_pair(cheb: &[f64], natural_scale: f64, family: Family, kappa: f64, eps: f64) -> Result<TargetPair> {
    if cheb.iter().any(|c| !c.is_finite()) {
        return Err(Error::NonFiniteCoefficient(family.to_string()));
    }
    // keep |A| <= 1/2 even where the polynomial overshoots its nominal bound
    let sup = chebyshev::sampled_sup(cheb, SUP_SAMPLES);
    let scale = natural_scale.min(0.5 / sup);
    let half: Vec<f64> = cheb.iter().map(|c| scale * c).collect();
    let a = LaurentPolynomial::from_chebyshev(&half, &[]);
    let mut meta = TargetMeta::new(family, scale);
    meta.kappa = Some(kappa);
    meta.eps_approx = Some(eps);
    TargetPair::new(a.clone(), LaurentPolynomial::zeros(a.degree()), meta)
}

/// `A = s P_{1/x}` with `s = min(1/(2κ), 1/(2 sup|P_{1/x}|))`, `B = 0`.
pub fn build_inverse(kappa: f64, eps: f64) -> Result<TargetPair> {
    let cheb = inverse_chebyshev(kappa, eps)?;
    let cell = inverse_cell(kappa, eps)?;
    if cell.overflow {
        return Err(Error::CoefficientOverflow { cell: Box::new(cell) });
    }
    scaled_pair(&cheb, 0.5 / kappa, Family::Inverse, kappa, eps)
}

/// The composed series `(1/2κ) P_{1/x} (1 - P_rect)` and its ingredients.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixInversionSeries {
    pub params: InverseParams,
    pub eps_rect: f64,
    pub rect: RectPolynomial,
    /// Chebyshev coefficients of the product, degree `2 j0 + 1 + deg(rect)`.
    pub chebyshev: Vec<f64>,
}

impl MatrixInversionSeries {
    pub fn degree(&self) -> usize {
        self.chebyshev.len() - 1
    }
}

/// `ε_rect = min(ε, κ/(2 j0))`.
pub fn eps_rect(kappa: f64, eps: f64) -> Result<f64> {
    let p = inverse_params(kappa, eps)?;
    Ok(eps.min(kappa / (2.0 * p.j0 as f64)))
}

/// The rectangle parameters `t = 1/(2κ)` and `δ = 1/κ` used by the matrix-inversion target.
pub(crate) fn mi_rect_params(kappa: f64) -> (f64, f64) {
    (0.5 / kappa, 1.0 / kappa)
}

/// Tabulated degree `n_inv + n_rect` with `n_inv = j0`, `k_rect = √2 κ ln^{1/2}(8/(π ε_rect²))`
/// and `n_rect = 1 + 2 n_exp(2 k_rect², √π ε_rect/(8 k_rect))`.
///
/// This is a bookkeeping formula; the polynomial actually built has degree
/// `2 j0 + 1 + deg(P_rect)`, reported by [`MatrixInversionSeries::degree`].
pub fn matrix_inversion_degree_formula(kappa: f64, eps: f64) -> Result<usize> {
    let p = inverse_params(kappa, eps)?;
    let er = eps_rect(kappa, eps)?;
    let k = SQRT_2 * kappa * (8.0 / (PI * er * er)).ln().sqrt();
    let n_rect = 1 + 2 * n_exp(2.0 * k * k, PI.sqrt() * er / (8.0 * k));
    Ok(p.j0 + n_rect)
}

pub(crate) fn mi_series_inner(kappa: f64, eps: f64, bessel_guard: bool) -> Result<MatrixInversionSeries> {
    let params = inverse_params(kappa, eps)?;
    let er = eps_rect(kappa, eps)?;
    let (t, delta) = mi_rect_params(kappa);
    let rect = rect_inner(t, delta, er, bessel_guard)?;
    let mut one_minus = rect.chebyshev();
    for v in one_minus.iter_mut() {
        *v = -*v;
    }
    one_minus[0] += 1.0;
    let inv = inverse_chebyshev(kappa, eps)?;
    let mut chebyshev = chebyshev::product(&inv, &one_minus);
    let s = 0.5 / kappa;
    for (i, v) in chebyshev.iter_mut().enumerate() {
        // odd times even: even entries vanish exactly
        *v = if i % 2 == 0 { 0.0 } else { s * *v };
    }
    Ok(MatrixInversionSeries { params, eps_rect: er, rect, chebyshev })
}

pub fn matrix_inversion_chebyshev(kappa: f64, eps: f64) -> Result<MatrixInversionSeries> {
    mi_series_inner(kappa, eps, true)
}

/// `A = P_MI` (rescaled further only if it overshoots `1/2`), `B = 0`. Refuses with
/// [`Error::CoefficientOverflow`] when the monomial coefficients exceed binary64, which is the
/// expected outcome for realistic `κ` and `ε`.
pub fn build_matrix_inversion(kappa: f64, eps: f64) -> Result<TargetPair> {
    inverse_params(kappa, eps)?;
    let cell = matrix_inversion_cell(kappa, eps)?;
    if cell.overflow {
        return Err(Error::CoefficientOverflow { cell: Box::new(cell) });
    }
    let series = matrix_inversion_chebyshev(kappa, eps)?;
    scaled_pair(&series.chebyshev, 1.0, Family::MatrixInversion, kappa, eps)
}
