//! Hamiltonian simulation: the truncated Jacobi–Anger expansion of `½ e^{iτ cos θ}`.

use std::f64::consts::E;

use crate::error::{domain, Result};
use crate::laurent::LaurentPolynomial;
use crate::special::bessel_j_all;

use super::{Family, TargetMeta, TargetPair};

/// Truncation degree `r̃(τ, ε)`.
pub fn truncation_hs(tau: f64, eps: f64) -> Result<usize> {
    if !(tau > 0.0) || !(eps > 0.0 && eps < 1.0) {
        return domain(format!("truncation_hs needs tau > 0 and 0 < eps < 1 (got tau={tau}, eps={eps})"));
    }
    let l = (1.0 / eps).ln();
    let r = if tau >= l / E {
        (E * tau + l).ceil()
    } else {
        (4.0 * l / (E + l / tau).ln()).ceil()
    };
    Ok(r as usize)
}

/// `A = ½ cos(τ cos θ)` and `B = ½ sin(τ cos θ)`, both truncated at degree `r̃`.
///
/// Even Bessel orders feed `A` and odd orders feed `B`; both are real symmetric, so `B` is
/// reciprocal rather than anti-reciprocal.
pub fn build_hamiltonian_sim(tau: f64, eps: f64) -> Result<TargetPair> {
    let r = truncation_hs(tau, eps)?;
    let j = bessel_j_all(r, tau)?;
    let mut cos_part = vec![0.0; r + 1];
    let mut sin_part = vec![0.0; r + 1];
    for (m, &jm) in j.iter().enumerate() {
        // cos(τ cos θ) = J_0 + 2 Σ (−1)^k J_{2k} cos 2kθ, sin(τ cos θ) = 2 Σ (−1)^k J_{2k+1} cos (2k+1)θ
        let sign = if (m / 2) % 2 == 0 { 1.0 } else { -1.0 };
        let weight = if m == 0 { 1.0 } else { 2.0 };
        let v = 0.5 * weight * sign * jm;
        if m % 2 == 0 {
            cos_part[m] = v;
        } else {
            sin_part[m] = v;
        }
    }
    let a = LaurentPolynomial::from_chebyshev(&cos_part, &[]);
    let b = LaurentPolynomial::from_chebyshev(&sin_part, &[]);
    let mut meta = TargetMeta::new(Family::Hs, 0.5);
    meta.tau = Some(tau);
    meta.eps_approx = Some(eps);
    TargetPair::new(a.padded(r), b.padded(r), meta)
}
