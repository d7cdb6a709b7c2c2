//! Eigenvalue-threshold polynomial `T_k(u(x)) / T_k(u(0))` with
//! `u(x) = -1 + 2(x^2 - Δ^2)/(1 - Δ^2)`.

use std::f64::consts::SQRT_2;

use crate::chebyshev;
use crate::error::{domain, Result};
use crate::laurent::LaurentPolynomial;

use super::{Family, TargetMeta, TargetPair};

/// `k = ⌈ln(2/ε) / (√2 Δ)⌉`.
pub fn threshold_k(delta: f64, eps: f64) -> Result<usize> {
    check(delta, eps)?;
    Ok(((2.0 / eps).ln() / (SQRT_2 * delta)).ceil() as usize)
}

fn check(delta: f64, eps: f64) -> Result<()> {
    if !(delta > 0.0 && delta <= 1.0 / 12f64.sqrt()) || !(eps > 0.0 && eps < 1.0) {
        return domain(format!(
            "threshold needs 0 < delta <= 1/sqrt(12) and 0 < eps < 1 (got delta={delta}, eps={eps})"
        ));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdPolynomial {
    pub delta: f64,
    pub eps: f64,
    pub k: usize,
    /// Chebyshev coefficients in `x`, degree `2k`.
    pub chebyshev: Vec<f64>,
}

impl ThresholdPolynomial {
    /// Pointwise value without forming any coefficient list.
    ///
    /// On `|u| <= 1` the numerator is `cos(k arccos u)`; below `-1` it is `±cosh(k arccosh(-u))`.
    /// Both are divided by `|T_k(u(0))| = cosh(k y0)` through exponentials of differences, so
    /// nothing overflows for large `k`.
    pub fn eval(&self, x: f64) -> f64 {
        evaluate(self.delta, self.k, x)
    }

    pub fn degree(&self) -> usize {
        2 * self.k
    }

    /// `A = P/2`, `B = 0`.
    pub fn to_target_pair(&self) -> Result<TargetPair> {
        let half: Vec<f64> = self.chebyshev.iter().map(|c| 0.5 * c).collect();
        let mut meta = TargetMeta::new(Family::Threshold, 0.5);
        meta.delta = Some(self.delta);
        meta.eps_approx = Some(self.eps);
        TargetPair::new(
            LaurentPolynomial::from_chebyshev(&half, &[]),
            LaurentPolynomial::zeros(self.degree()),
            meta,
        )
    }
}

fn evaluate(delta: f64, k: usize, x: f64) -> f64 {
    let d2 = delta * delta;
    let u = (-1.0 + 2.0 * (x * x - d2) / (1.0 - d2)).clamp(f64::NEG_INFINITY, 1.0);
    let y0 = (1.0 + 2.0 * d2 / (1.0 - d2)).acosh();
    let kf = k as f64;
    let parity = if k % 2 == 0 { 1.0 } else { -1.0 };
    // T_k(u0) = parity · cosh(k y0) because u0 < -1
    if u >= -1.0 {
        let sech = 2.0 * (-kf * y0).exp() / (1.0 + (-2.0 * kf * y0).exp());
        parity * (kf * u.acos()).cos() * sech
    } else {
        let y = (-u).acosh();
        (kf * (y - y0)).exp() * (1.0 + (-2.0 * kf * y).exp()) / (1.0 + (-2.0 * kf * y0).exp())
    }
}

/// Threshold polynomial with Chebyshev coefficients obtained by interpolation at `2k + 1` nodes.
pub fn build_threshold(delta: f64, eps: f64) -> Result<ThresholdPolynomial> {
    let k = threshold_k(delta, eps)?;
    let chebyshev = chebyshev::interpolate(|x| evaluate(delta, k, x), 2 * k);
    Ok(ThresholdPolynomial { delta, eps, k, chebyshev })
}
