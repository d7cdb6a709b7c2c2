//! Fejér (spectral) factorisation by Wilson's Newton–Raphson iteration.
//!
//! Given the distinct coefficients `F_0..F_n` of a real symmetric Laurent polynomial that is
//! nonnegative on the unit circle, find `γ_0..γ_n` with `F_i = sum_j γ_j γ_{j+i}` and all roots
//! of `γ(z)` outside the closed unit disk.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::chebyshev::clenshaw;
use crate::error::{Error, Result};
use crate::linalg::{DenseMatrix, LuFactors};

pub const DEFAULT_EPS_FEJER: f64 = 1e-14;
pub const DEFAULT_MAX_ITER: usize = 200;

/// Consecutive residual increases tolerated before giving up.
const DIVERGENCE_RUN: usize = 5;

/// Below `STALL_LEVEL * F_0` a well-posed instance converges quadratically; two consecutive
/// steps that shrink the residual by less than `STALL_RATIO` there indicate zeros on the circle.
const STALL_LEVEL: f64 = 1e-8;
const STALL_RATIO: f64 = 0.1;
const STALL_RUN: usize = 2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FejerInstance {
    #[serde(rename = "F")]
    pub f: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FejerFactor {
    pub gamma: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct WilsonReport {
    pub iterations: usize,
    pub residual_linf: f64,
    pub converged: bool,
    pub residual_history: Vec<f64>,
}

impl FejerInstance {
    pub fn new(f: Vec<f64>) -> Result<Self> {
        if f.is_empty() {
            return Err(Error::Invalid("Fejér instance needs at least F_0".into()));
        }
        if let Some(i) = f.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteCoefficient(format!("Fejér coefficient F_{i}")));
        }
        Ok(Self { f })
    }

    pub fn degree(&self) -> usize {
        self.f.len() - 1
    }

    /// `F(e^{iθ}) = F_0 + 2 sum F_k cos kθ`.
    pub fn eval(&self, theta: f64) -> f64 {
        clenshaw(&self.cheb(), theta.cos())
    }

    fn cheb(&self) -> Vec<f64> {
        self.f
            .iter()
            .enumerate()
            .map(|(k, &v)| if k == 0 { v } else { 2.0 * v })
            .collect()
    }

    /// Minimum over the `8(n+1)`-point witness grid.
    pub fn grid_min(&self) -> f64 {
        let cheb = self.cheb();
        let points = 8 * (self.degree() + 1);
        (0..points)
            .map(|j| clenshaw(&cheb, (2.0 * PI * j as f64 / points as f64).cos()))
            .fold(f64::INFINITY, f64::min)
    }

    /// Negativity tolerance `1e-12 F_0`.
    pub fn tol_neg(&self) -> f64 {
        1e-12 * self.f[0].abs()
    }

    /// Apply the nonnegativity witness. Slightly negative instances are lifted by `tol_neg`.
    pub fn checked(&self) -> Result<Self> {
        let min = self.grid_min();
        let tol = self.tol_neg();
        if min < -tol || !(self.f[0] > 0.0) {
            return Err(Error::NegativeInstance { min, tol });
        }
        let mut out = self.clone();
        if min < 0.0 {
            out.f[0] += tol;
        }
        Ok(out)
    }
}

impl FejerFactor {
    pub fn degree(&self) -> usize {
        self.gamma.len() - 1
    }

    /// `γ(e^{iθ})` as `(re, im)`.
    pub fn eval(&self, theta: f64) -> (f64, f64) {
        // Horner in z = e^{iθ}
        let (c, s) = (theta.cos(), theta.sin());
        let (mut re, mut im) = (0.0, 0.0);
        for &g in self.gamma.iter().rev() {
            let r = re * c - im * s + g;
            im = re * s + im * c;
            re = r;
        }
        (re, im)
    }

    /// Winding number of `γ(e^{iθ})` about the origin on a `16(n+1)`-point grid.
    pub fn winding_number(&self) -> i64 {
        let points = 16 * (self.degree() + 1);
        let arg = |j: usize| {
            let (re, im) = self.eval(2.0 * PI * j as f64 / points as f64);
            im.atan2(re)
        };
        let first = arg(0);
        let mut prev = first;
        let mut total = 0.0;
        for j in 1..=points {
            let cur = if j == points { first } else { arg(j) };
            let mut d = cur - prev;
            if d > PI {
                d -= 2.0 * PI;
            } else if d < -PI {
                d += 2.0 * PI;
            }
            total += d;
            prev = cur;
        }
        (total / (2.0 * PI)).round() as i64
    }

    /// `γ_0 > 0` and zero winding (no roots inside the disk).
    pub fn is_valid(&self) -> bool {
        self.gamma[0] > 0.0 && self.winding_number() == 0
    }
}

/// `c_i = sum_{j=0}^{n-i} γ_j γ_{j+i}`.
pub fn convolve_gamma(gamma: &FejerFactor) -> Vec<f64> {
    let g = &gamma.gamma;
    (0..g.len())
        .map(|i| g.iter().zip(&g[i..]).map(|(a, b)| a * b).sum())
        .collect()
}

/// `T1 + T2` with `T1 = [γ_{i+j}]` (zero past degree n) and `T2 = [γ_{j-i}]` (upper triangular).
pub fn build_jacobian(gamma: &FejerFactor) -> DenseMatrix {
    let g = &gamma.gamma;
    let n = g.len();
    let mut m = DenseMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            let mut v = 0.0;
            if i + j < n {
                v += g[i + j];
            }
            if j >= i {
                v += g[j - i];
            }
            m.set(i, j, v);
        }
    }
    m
}

fn residual_linf(gamma: &FejerFactor, f: &[f64]) -> f64 {
    convolve_gamma(gamma)
        .iter()
        .zip(f)
        .map(|(c, t)| (c - t).abs())
        .fold(0.0, f64::max)
}

/// Smallest residual that binary64 convolution can resolve for this instance.
///
/// Each `c_i` is a sum of at most `n+1` products bounded in total by `F_0`, so its computed
/// value carries an error of order `(n+1) u F_0`.
pub fn residual_floor(instance: &FejerInstance) -> f64 {
    4.0 * (instance.degree() + 1) as f64 * f64::EPSILON * instance.f[0].abs()
}

/// Run Wilson's iteration from `γ^0 = sqrt(F_0)`.
///
/// Each step is the Newton update for `γ ⋆ γ = F` with Jacobian `T1 + T2`. The iteration stops
/// once the coefficient residual is below `max(eps_fejer, residual_floor)` and the iterate has
/// `γ_0 > 0` and winding number zero.
pub fn wilson_factorize(
    instance: &FejerInstance,
    eps_fejer: f64,
    max_iter: usize,
) -> Result<(FejerFactor, WilsonReport)> {
    if !(eps_fejer > 0.0) {
        return Err(Error::Invalid("eps_fejer must be positive".into()));
    }
    let inst = instance.checked()?;
    let f = &inst.f;
    let n = inst.degree();
    let target = eps_fejer.max(residual_floor(&inst));

    let mut gamma = FejerFactor { gamma: vec![0.0; n + 1] };
    gamma.gamma[0] = f[0].sqrt();
    let mut best = gamma.clone();
    let mut best_res = residual_linf(&gamma, f);
    let mut report = WilsonReport::default();
    let mut increases = 0;
    let mut slow = 0;

    while report.iterations < max_iter {
        // x = (T1+T2)^{-1}(c + F) is computed as γ + (T1+T2)^{-1}(F - c): the same iterate, but
        // the solve's rounding error then scales with the correction instead of with γ.
        let c = convolve_gamma(&gamma);
        let rhs: Vec<f64> = f.iter().zip(&c).map(|(a, b)| a - b).collect();
        let step = LuFactors::factor(build_jacobian(&gamma))?.solve(&rhs);
        if let Some(i) = step.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteCoefficient(format!("Wilson iterate γ_{i}")));
        }
        for (g, d) in gamma.gamma.iter_mut().zip(&step) {
            *g += d;
        }
        let res = residual_linf(&gamma, f);
        let prev = report.residual_history.last().copied();
        report.iterations += 1;
        report.residual_history.push(res);
        report.residual_linf = res;
        if res < best_res {
            best_res = res;
            best = gamma.clone();
        }
        if res <= target && gamma.is_valid() {
            report.converged = true;
            return Ok((gamma, report));
        }
        match prev {
            Some(p) if res > p => increases += 1,
            _ => increases = 0,
        }
        match prev {
            Some(p) if p < STALL_LEVEL * f[0] && res > STALL_RATIO * p => slow += 1,
            _ => slow = 0,
        }
        if increases >= DIVERGENCE_RUN || slow >= STALL_RUN {
            break;
        }
    }
    report.residual_linf = best_res;
    Err(Error::NoConvergence { best, report })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factor(g: &[f64]) -> FejerFactor {
        FejerFactor { gamma: g.to_vec() }
    }

    #[test]
    fn convolution_examples() {
        assert_eq!(convolve_gamma(&factor(&[1.0])), vec![1.0]);
        assert_eq!(convolve_gamma(&factor(&[2.0, 1.0])), vec![5.0, 2.0]);
        assert_eq!(convolve_gamma(&factor(&[3.0, 1.0, 1.0])), vec![11.0, 4.0, 3.0]);
    }

    #[test]
    fn jacobian_examples() {
        let j = build_jacobian(&factor(&[1.0, 0.0]));
        assert_eq!(j, DenseMatrix::from_rows(&[vec![2.0, 0.0], vec![0.0, 1.0]]).unwrap());
        let g = factor(&[0.7, -0.2, 0.4, 0.1]);
        let jg = build_jacobian(&g).mul_vec(&g.gamma);
        for (a, c) in jg.iter().zip(convolve_gamma(&g)) {
            assert!((a - 2.0 * c).abs() < 1e-15);
        }
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let g = factor(&[1.3, 0.4, -0.25, 0.1, 0.05]);
        let jac = build_jacobian(&g);
        let c0 = convolve_gamma(&g);
        let h = 1e-7;
        for j in 0..5 {
            let mut gp = g.clone();
            gp.gamma[j] += h;
            let c1 = convolve_gamma(&gp);
            for i in 0..5 {
                assert!(((c1[i] - c0[i]) - jac.get(i, j) * h).abs() < 1e-6 * h.max(1e-7));
            }
        }
    }

    #[test]
    fn factorizes_small_examples() {
        let (g, rep) = wilson_factorize(&FejerInstance::new(vec![1.0]).unwrap(), 1e-14, 200).unwrap();
        assert_eq!(g.gamma, vec![1.0]);
        assert!(rep.iterations <= 2 && rep.converged);

        for (f, want) in [(vec![5.0, 2.0], vec![2.0, 1.0]), (vec![11.0, 4.0, 3.0], vec![3.0, 1.0, 1.0])] {
            let (g, rep) = wilson_factorize(&FejerInstance::new(f).unwrap(), 1e-14, 200).unwrap();
            assert_eq!(rep.residual_history.len(), rep.iterations);
            assert!(g.is_valid());
            for (a, b) in g.gamma.iter().zip(&want) {
                assert!((a - b).abs() < 1e-12, "{:?}", g.gamma);
            }
        }
    }

    #[test]
    fn scale_covariance() {
        let f = vec![11.0, 4.0, 3.0];
        let (g1, _) = wilson_factorize(&FejerInstance::new(f.clone()).unwrap(), 1e-14, 200).unwrap();
        let s = 3.5;
        let fs: Vec<f64> = f.iter().map(|v| v * s * s).collect();
        let (g2, _) = wilson_factorize(&FejerInstance::new(fs).unwrap(), 1e-14, 200).unwrap();
        for (a, b) in g1.gamma.iter().zip(&g2.gamma) {
            assert!((s * a - b).abs() <= 1e-10 * b.abs());
        }
    }

    #[test]
    fn negative_instance_rejected() {
        // 1 + 2 cos θ dips to -1
        let err = wilson_factorize(&FejerInstance::new(vec![1.0, 1.0]).unwrap(), 1e-14, 200).unwrap_err();
        assert!(matches!(err, Error::NegativeInstance { .. }));
    }

    #[test]
    fn circle_zero_is_reported_not_accepted() {
        // 1 - cos^2 θ = 1/2 - (z^2 + z^-2)/4 has double zeros on the circle
        let inst = FejerInstance::new(vec![0.5, 0.0, -0.25]).unwrap();
        match wilson_factorize(&inst, 1e-14, 200) {
            Ok((_, rep)) => panic!("accepted degenerate instance: {rep:?}"),
            Err(Error::NoConvergence { report, .. }) => assert!(!report.converged),
            Err(Error::SingularMatrix { .. }) => {}
            Err(e) => panic!("unexpected error {e}"),
        }
    }

    #[test]
    fn winding_detects_inside_root() {
        // γ(z) = 1 + 2z has its root at -1/2
        assert_eq!(factor(&[1.0, 2.0]).winding_number(), 1);
        assert_eq!(factor(&[2.0, 1.0]).winding_number(), 0);
    }

    #[test]
    fn report_json_shape() {
        let rep = WilsonReport { iterations: 1, residual_linf: 0.5, converged: false, residual_history: vec![0.5] };
        let v: serde_json::Value = serde_json::to_value(&rep).unwrap();
        assert_eq!(v["iterations"], 1);
        assert_eq!(v["residual_history"][0], 0.5);
    }
}
