//! Complementary polynomials `C`, `D` with `A² + B² + C² + D² = 1` on the unit circle.

use std::time::Instant;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fejer::{wilson_factorize, FejerInstance, WilsonReport, DEFAULT_MAX_ITER};
use crate::laurent::{theta_grid, LaurentPolynomial};
use crate::targets::{TargetPair, BOUND_SLACK};

/// Smallest padding magnitude used when one target component vanishes.
pub const MIN_EPS_PAD: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct CompletionReport {
    pub wilson: WilsonReport,
    /// `max |A² + B² + C² + D² - 1|` on an `8(n+1)`-point grid.
    pub unitarity_residual: f64,
    /// Largest coefficient of `A² + B² + C² + D² - 1`.
    pub eps_coeff: f64,
    pub elapsed_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompletedQuadruple {
    #[serde(rename = "A")]
    pub a: LaurentPolynomial,
    #[serde(rename = "B")]
    pub b: LaurentPolynomial,
    #[serde(rename = "C")]
    pub c: LaurentPolynomial,
    #[serde(rename = "D")]
    pub d: LaurentPolynomial,
    pub report: CompletionReport,
}

impl CompletedQuadruple {
    pub fn degree(&self) -> usize {
        self.a.degree()
    }

    /// `A² + B² + C² + D² - 1` as a Laurent polynomial.
    pub fn unitarity_defect(&self) -> LaurentPolynomial {
        let sum = &(&(&self.a * &self.a) + &(&self.b * &self.b)) + &(&(&self.c * &self.c) + &(&self.d * &self.d));
        &sum - &LaurentPolynomial::constant(Complex64::new(1.0, 0.0))
    }

    /// Grid maximum of `|A² + B² + C² + D² - 1|` using the real parts on the circle.
    pub fn sampled_unitarity_residual(&self, points: usize) -> f64 {
        theta_grid(points)
            .map(|t| {
                let v = [&self.a, &self.b, &self.c, &self.d]
                    .iter()
                    .map(|p| p.eval_on_circle(t).re.powi(2))
                    .sum::<f64>();
                (v - 1.0).abs()
            })
            .fold(0.0, f64::max)
    }
}

/// Distinct coefficients `F_0..F_{2n}` of `1 - A² - B²`.
pub fn deficiency_polynomial(a: &LaurentPolynomial, b: &LaurentPolynomial) -> Result<FejerInstance> {
    let n = a.degree().max(b.degree());
    let (a, b) = (a.padded(n), b.padded(n));
    let max = theta_grid(8 * (n + 1))
        .map(|t| a.eval_on_circle(t).re.powi(2) + b.eval_on_circle(t).re.powi(2))
        .fold(0.0, f64::max);
    if max > 1.0 + BOUND_SLACK {
        return Err(Error::NotCompletable { max });
    }
    let sq = &(&a * &a) + &(&b * &b);
    let f: Vec<f64> = (0..=2 * n as i64)
        .map(|k| {
            let v = -sq.coeff(k).re;
            if k == 0 {
                1.0 + v
            } else {
                v
            }
        })
        .collect();
    FejerInstance::new(f)
}

/// Replace a vanishing component by `ε_pad sum cos lθ` or `ε_pad sum sin lθ` over
/// `l ≡ n-1 (mod 2)`, `1 <= l <= n-1`, choosing the reciprocity class opposite to the other
/// component. Pairs where neither or both components vanish are returned unchanged.
pub fn handle_zero_component(pair: TargetPair, eps: f64) -> Result<TargetPair> {
    let (a_zero, b_zero) = (pair.a().is_zero(), pair.b().is_zero());
    if a_zero == b_zero {
        return Ok(pair);
    }
    let n = pair.degree();
    let other = if a_zero { pair.b() } else { pair.a() };
    let reciprocal = other.classify(crate::targets::CLASS_TOL).is_reciprocal;
    let mut cos = vec![0.0; n];
    let mut sin = vec![0.0; n];
    for l in (1..n).filter(|l| (n - 1 - l) % 2 == 0) {
        if reciprocal {
            sin[l] = eps;
        } else {
            cos[l] = eps;
        }
    }
    let pad = LaurentPolynomial::from_chebyshev(&cos, &sin).padded(n);
    let (a, b, meta) = pair.into_parts();
    if a_zero {
        TargetPair::new(pad, b, meta)
    } else {
        TargetPair::new(a, pad, meta)
    }
}

/// Complete with the default Wilson iteration cap.
pub fn complete(pair: &TargetPair, eps_fejer: f64) -> Result<CompletedQuadruple> {
    complete_with_max_iter(pair, eps_fejer, DEFAULT_MAX_ITER)
}

/// Factor `1 - A² - B² = |γ|²` and set `C + iD = z^{-n} γ(z)`.
///
/// A vanishing component is padded first ([`handle_zero_component`] with
/// `ε_pad = max(1e-13, eps_fejer)`); the padded pair is what the quadruple holds.
pub fn complete_with_max_iter(pair: &TargetPair, eps_fejer: f64, max_iter: usize) -> Result<CompletedQuadruple> {
    let pair = handle_zero_component(pair.clone(), MIN_EPS_PAD.max(eps_fejer))?;
    let n = pair.degree();
    let instance = deficiency_polynomial(pair.a(), pair.b())?;
    let (a, b, _) = pair.into_parts();

    // A² + B² ≡ 1 already: the zero instance has no factor, and C = D = 0 completes it
    let floor = 4.0 * (2 * n + 1) as f64 * f64::EPSILON;
    if instance.f.iter().all(|v| v.abs() <= floor) {
        let mut q = CompletedQuadruple {
            a,
            b,
            c: LaurentPolynomial::zeros(n),
            d: LaurentPolynomial::zeros(n),
            report: CompletionReport::default(),
        };
        q.report.wilson.converged = true;
        fill_residuals(&mut q);
        return Ok(q);
    }

    let start = Instant::now();
    let (gamma, wilson) = wilson_factorize(&instance, eps_fejer, max_iter)?;
    let elapsed_seconds = start.elapsed().as_secs_f64();

    let g = &gamma.gamma;
    let mut c = LaurentPolynomial::zeros(n);
    let mut d = LaurentPolynomial::zeros(n);
    for k in -(n as i64)..=(n as i64) {
        let gp = g[(k + n as i64) as usize];
        let gm = g[(n as i64 - k) as usize];
        c.set(k, Complex64::new(0.5 * (gp + gm), 0.0));
        d.set(k, Complex64::new(0.0, -0.5 * (gp - gm)));
    }
    let mut q = CompletedQuadruple {
        a,
        b,
        c,
        d,
        report: CompletionReport { wilson, elapsed_seconds, ..Default::default() },
    };
    fill_residuals(&mut q);
    Ok(q)
}

fn fill_residuals(q: &mut CompletedQuadruple) {
    q.report.unitarity_residual = q.sampled_unitarity_residual(8 * (q.degree() + 1));
    q.report.eps_coeff = q.unitarity_defect().coeffs().iter().map(|c| c.norm()).fold(0.0, f64::max);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::targets::{build_random, Family, TargetMeta};

    fn pair(a: &[Complex64], b: &[Complex64]) -> TargetPair {
        TargetPair::new(
            LaurentPolynomial::new(a.to_vec()).unwrap(),
            LaurentPolynomial::new(b.to_vec()).unwrap(),
            TargetMeta::new(Family::Custom, 1.0),
        )
        .unwrap()
    }

    fn re(v: f64) -> Complex64 {
        Complex64::new(v, 0.0)
    }

    fn im(v: f64) -> Complex64 {
        Complex64::new(0.0, v)
    }

    #[test]
    fn deficiency_examples() {
        let half_cos = LaurentPolynomial::new(vec![re(0.25), re(0.0), re(0.25)]).unwrap();
        let f = deficiency_polynomial(&half_cos, &LaurentPolynomial::zeros(1)).unwrap();
        assert_eq!(f.f, vec![0.875, 0.0, -0.0625]);
        let half_sin = LaurentPolynomial::new(vec![im(0.25), re(0.0), im(-0.25)]).unwrap();
        let f = deficiency_polynomial(&LaurentPolynomial::zeros(1), &half_sin).unwrap();
        assert_eq!(f.f, vec![0.875, 0.0, 0.0625]);
        let one = LaurentPolynomial::constant(re(1.0));
        let f = deficiency_polynomial(&one, &LaurentPolynomial::zero()).unwrap();
        assert_eq!(f.f, vec![0.0]);
        let big = LaurentPolynomial::constant(re(1.1));
        assert!(matches!(
            deficiency_polynomial(&big, &LaurentPolynomial::zero()),
            Err(Error::NotCompletable { .. })
        ));
    }

    #[test]
    fn padding_shape() {
        let a = [re(0.1), re(0.0), re(0.0), re(0.0), re(0.2), re(0.0), re(0.0), re(0.0), re(0.1)];
        let p = handle_zero_component(pair(&a, &[re(0.0)]), 1e-13).unwrap();
        let b = p.b();
        assert_eq!(b.degree(), 4);
        assert_eq!(b.coeff(4), re(0.0));
        for k in [1i64, 3] {
            assert!((b.coeff(k) - im(-0.5e-13)).norm() < 1e-30);
            assert!((b.coeff(-k) - im(0.5e-13)).norm() < 1e-30);
        }
        assert_eq!(b.coeff(2), re(0.0));
        assert!(b.classify(0.0).is_anti_reciprocal);
        assert!(b.linf_on_circle(64).unwrap() <= 1e-13 * 4.0);

        // A = 0 with a reciprocal B gets an anti-reciprocal A
        let p = handle_zero_component(pair(&[re(0.0)], &a), 1e-13).unwrap();
        assert!(p.a().classify(0.0).is_anti_reciprocal);
        assert!(!p.a().is_zero());
    }

    #[test]
    fn unitary_input_short_circuits() {
        let q = complete(&pair(&[re(1.0)], &[re(0.0)]), 1e-14).unwrap();
        assert!(q.c.is_zero() && q.d.is_zero());
        assert_eq!(q.report.unitarity_residual, 0.0);
        assert_eq!(q.report.wilson.iterations, 0);
    }

    #[test]
    fn completes_half_cosine() {
        let q = complete(&pair(&[re(0.25), re(0.0), re(0.25)], &[re(0.0)]), 1e-14).unwrap();
        assert_eq!(q.c.degree(), 1);
        for t in theta_grid(64) {
            let cd = q.c.eval_on_circle(t).re.powi(2) + q.d.eval_on_circle(t).re.powi(2);
            assert!((cd - (1.0 - 0.25 * t.cos().powi(2))).abs() < 1e-12);
        }
        assert!(q.c.classify(0.0).is_reciprocal && q.c.classify(0.0).is_real_on_circle);
        assert!(q.d.classify(0.0).is_anti_reciprocal && q.d.classify(0.0).is_real_on_circle);
    }

    #[test]
    fn random_degree_100() {
        let p = build_random(100, 7).unwrap();
        let q = complete(&p, 1e-14).unwrap();
        assert!(q.report.wilson.converged);
        assert!(q.report.unitarity_residual <= 1e-11, "{}", q.report.unitarity_residual);
        assert!(q.report.eps_coeff <= 1e-11);
        let again = complete(&p, 1e-14).unwrap();
        assert_eq!(q.c, again.c);
        assert_eq!(q.d, again.d);
    }

    #[test]
    fn json_keys() {
        let q = complete(&pair(&[re(0.25), re(0.0), re(0.25)], &[re(0.0)]), 1e-14).unwrap();
        let v: serde_json::Value = serde_json::to_value(&q).unwrap();
        for key in ["A", "B", "C", "D", "report"] {
            assert!(v.get(key).is_some(), "{key}");
        }
        let back: CompletedQuadruple = serde_json::from_value(v).unwrap();
        assert_eq!(back.c, q.c);
    }
}
