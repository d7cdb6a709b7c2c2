//! Polynomial approximations of `erf(kx)`, `sign(x - a)` and the rectangle function.

use std::f64::consts::{E, PI, SQRT_2};

use crate::chebyshev;
use crate::error::{domain, Error, Result};
use crate::laurent::LaurentPolynomial;
use crate::special::{bessel_i_scaled_all, i_scaled_miller};

use super::accessibility::{erf_cell, rect_cell, sign_cell};
use super::{Family, TargetMeta, TargetPair};

/// Degree of an `ε`-close expansion of `e^{-β(1+x)}`.
pub fn n_exp(beta: f64, eps: f64) -> usize {
    let inner = (beta * E * E).max((2.0 / eps).ln()).ceil();
    (2.0 * (4.0 / eps).ln() * inner).sqrt().ceil() as usize
}

/// `(k, n)` of the sign approximation: `k = (√2/κ) ln^{1/2}(8/(πε²))` and
/// `n = 2 n_exp(2k², √π ε/(16k)) + 1`.
pub fn sign_params(kappa: f64, eps: f64) -> Result<(f64, usize)> {
    let eps_max = 2.0 * (2.0 / (E * PI)).sqrt();
    if !(kappa > 0.0) || !(eps > 0.0 && eps < eps_max) {
        return domain(format!(
            "sign approximation needs kappa > 0 and 0 < eps < {eps_max:.6} (got kappa={kappa}, eps={eps})"
        ));
    }
    let k = SQRT_2 / kappa * (8.0 / (PI * eps * eps)).ln().sqrt();
    let n = 2 * n_exp(2.0 * k * k, PI.sqrt() * eps / (16.0 * k)) + 1;
    Ok((k, n))
}

/// Degree `2 n_exp(k²/2, √π ε/(4k)) + 1` of the `ε`-close erf expansion.
pub fn erf_degree(k: f64, eps: f64) -> usize {
    2 * n_exp(k * k / 2.0, PI.sqrt() * eps / (4.0 * k)) + 1
}

/// Chebyshev coefficients of `p_erf(·, k, n)` from the scaled Bessel values `e^{-x} I_j(x)`
/// at `x = k²/2`; the `e^{-k²/2}` of the prefactor is exactly the scaling.
pub(crate) fn erf_coeffs_from_bessel(k: f64, n: usize, is: &[f64]) -> Vec<f64> {
    let pref = 2.0 * k / PI.sqrt();
    let top = (n - 1) / 2;
    let mut c = vec![0.0; n + 1];
    for j in 0..top {
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        c[2 * j + 1] = pref * sign * (is[j] + is[j + 1]) / (2 * j + 1) as f64;
    }
    let sign = if top % 2 == 0 { 1.0 } else { -1.0 };
    c[n] += pref * sign * is[top] / n as f64;
    c
}

/// Chebyshev coefficients of `p_erf(x, k, n)` (`n` odd).
pub fn erf_chebyshev(k: f64, n: usize) -> Result<Vec<f64>> {
    check_erf(k, n)?;
    let is = bessel_i_scaled_all((n - 1) / 2 + 1, k * k / 2.0)?;
    Ok(erf_coeffs_from_bessel(k, n, &is))
}

/// As [`erf_chebyshev`] without the Bessel range guard, for the log-magnitude analysis.
pub(crate) fn erf_chebyshev_unchecked(k: f64, n: usize) -> Vec<f64> {
    let is = i_scaled_miller((n - 1) / 2 + 1, k * k / 2.0);
    erf_coeffs_from_bessel(k, n, &is)
}

fn check_erf(k: f64, n: usize) -> Result<()> {
    if !(k > 0.0) || n % 2 == 0 {
        return domain(format!("erf expansion needs k > 0 and odd n (got k={k}, n={n})"));
    }
    Ok(())
}

/// `p_sign(x) = p_erf((x - a)/2, 2k, n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SignPolynomial {
    pub a: f64,
    pub kappa: f64,
    pub eps: f64,
    pub k: f64,
    pub n: usize,
    /// Chebyshev coefficients of `p_erf(·, 2k, n)` in its own argument.
    pub erf: Vec<f64>,
}

impl SignPolynomial {
    pub fn eval(&self, x: f64) -> f64 {
        chebyshev::clenshaw(&self.erf, (x - self.a) / 2.0)
    }

    /// Chebyshev coefficients in `x` by interpolation at `n + 1` nodes.
    pub fn chebyshev(&self) -> Vec<f64> {
        chebyshev::interpolate(|x| self.eval(x), self.n)
    }
}

fn sign_unchecked(a: f64, kappa: f64, eps: f64, bessel_guard: bool) -> Result<SignPolynomial> {
    if !(-1.0..=1.0).contains(&a) {
        return domain(format!("sign shift a must lie in [-1, 1], got {a}"));
    }
    let (k, n) = sign_params(kappa, eps)?;
    let erf = if bessel_guard { erf_chebyshev(2.0 * k, n)? } else { erf_chebyshev_unchecked(2.0 * k, n) };
    Ok(SignPolynomial { a, kappa, eps, k, n, erf })
}

pub fn sign_polynomial(a: f64, kappa: f64, eps: f64) -> Result<SignPolynomial> {
    sign_unchecked(a, kappa, eps, true)
}

/// `½ (p_sign(x, -a) - p_sign(x, a))` with `a = t + δ/4` and `κ = δ/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct RectPolynomial {
    pub t: f64,
    pub delta: f64,
    pub eps: f64,
    pub sign: SignPolynomial,
}

impl RectPolynomial {
    pub fn shift(&self) -> f64 {
        self.sign.a
    }

    pub fn degree(&self) -> usize {
        self.sign.n
    }

    pub fn eval(&self, x: f64) -> f64 {
        let a = self.shift();
        let g = |y: f64| chebyshev::clenshaw(&self.sign.erf, y);
        0.5 * (g((x + a) / 2.0) - g((x - a) / 2.0))
    }

    /// Chebyshev coefficients in `x`; the function is even, so odd entries are set to zero.
    pub fn chebyshev(&self) -> Vec<f64> {
        let mut c = chebyshev::interpolate(|x| self.eval(x), self.degree());
        for v in c.iter_mut().skip(1).step_by(2) {
            *v = 0.0;
        }
        c
    }
}

fn check_rect(t: f64, delta: f64) -> Result<()> {
    if !(t > 0.0) || !(delta > 0.0) || !(t + delta / 2.0 < 1.0) {
        return domain(format!("rect needs t > 0, delta > 0 and t + delta/2 < 1 (got t={t}, delta={delta})"));
    }
    Ok(())
}

pub(crate) fn rect_inner(t: f64, delta: f64, eps: f64, bessel_guard: bool) -> Result<RectPolynomial> {
    check_rect(t, delta)?;
    let sign = sign_unchecked(t + delta / 4.0, delta / 2.0, eps, bessel_guard)?;
    Ok(RectPolynomial { t, delta, eps, sign })
}

pub fn rect_polynomial(t: f64, delta: f64, eps: f64) -> Result<RectPolynomial> {
    rect_inner(t, delta, eps, true)
}

/// `P/2` placed in `A` (or in `B` when `in_b`), the other component zero.
fn half_pair(cheb: &[f64], meta: TargetMeta, in_b: bool) -> Result<TargetPair> {
    let half: Vec<f64> = cheb.iter().map(|c| 0.5 * c).collect();
    if half.iter().any(|c| !c.is_finite()) {
        return Err(Error::NonFiniteCoefficient(meta.family.to_string()));
    }
    let p = LaurentPolynomial::from_chebyshev(&half, &[]);
    let zero = LaurentPolynomial::zeros(p.degree());
    if in_b {
        TargetPair::new(zero, p, meta)
    } else {
        TargetPair::new(p, zero, meta)
    }
}

/// `A = 0`, `B = p_sign/2`. Refuses when the monomial coefficients overflow binary64.
pub fn build_sign(a: f64, kappa: f64, eps: f64) -> Result<TargetPair> {
    sign_params(kappa, eps)?;
    let cell = sign_cell(a, kappa, eps)?;
    if cell.overflow {
        return Err(Error::CoefficientOverflow { cell: Box::new(cell) });
    }
    let p = sign_polynomial(a, kappa, eps)?;
    let mut meta = TargetMeta::new(Family::Sign, 0.5);
    meta.a = Some(a);
    meta.kappa = Some(kappa);
    meta.eps_approx = Some(eps);
    half_pair(&p.chebyshev(), meta, true)
}

/// `A = P_rect/2`, `B = 0`. Refuses when the monomial coefficients overflow binary64.
pub fn build_rect(t: f64, delta: f64, eps: f64) -> Result<TargetPair> {
    check_rect(t, delta)?;
    sign_params(delta / 2.0, eps)?;
    let cell = rect_cell(t, delta, eps)?;
    if cell.overflow {
        return Err(Error::CoefficientOverflow { cell: Box::new(cell) });
    }
    let p = rect_polynomial(t, delta, eps)?;
    let mut meta = TargetMeta::new(Family::Rect, 0.5);
    meta.t = Some(t);
    meta.delta = Some(delta);
    meta.eps_approx = Some(eps);
    half_pair(&p.chebyshev(), meta, false)
}

/// `A = p_erf(x, k, n)/2` with `n` from [`erf_degree`], `B = 0`.
pub fn build_erf(k: f64, eps: f64) -> Result<TargetPair> {
    if !(eps > 0.0 && eps < 1.0) {
        return domain(format!("erf needs 0 < eps < 1, got {eps}"));
    }
    let n = erf_degree(k, eps);
    check_erf(k, n)?;
    let cell = erf_cell(k, eps)?;
    if cell.overflow {
        return Err(Error::CoefficientOverflow { cell: Box::new(cell) });
    }
    let mut meta = TargetMeta::new(Family::Erf, 0.5);
    meta.kappa = Some(k);
    meta.eps_approx = Some(eps);
    half_pair(&erf_chebyshev(k, n)?, meta, false)
}
