//! Scalar Laurent polynomials `sum_{k=-n}^{n} c_k z^k`, evaluated on the unit circle `z = e^{iθ}`.
//!
//! Coefficients are stored densely, offset by the degree, so `coeffs[k + n]` holds `c_k`.

use std::f64::consts::TAU;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Coefficients with modulus at or below this are dropped by [`LaurentPolynomial::trimmed`].
pub const TRIM_THRESHOLD: f64 = 1e-300;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "LaurentRepr", into = "LaurentRepr")]
pub struct LaurentPolynomial {
    degree: usize,
    coeffs: Vec<Complex64>,
}

/// Outcome of the coefficient-symmetry tests on a polynomial.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CirclePredicateReport {
    pub is_real_on_circle: bool,
    pub is_reciprocal: bool,
    pub is_anti_reciprocal: bool,
    /// Smallest of the three symmetry deviations (l∞ over coefficients).
    pub max_deviation: f64,
}

impl LaurentPolynomial {
    /// Builds a polynomial from `2n + 1` coefficients ordered `c_{-n}, …, c_n`.
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() % 2 == 0 {
            return Err(Error::Invalid(format!(
                "Laurent coefficient list must have odd length, got {}",
                coeffs.len()
            )));
        }
        Ok(Self {
            degree: coeffs.len() / 2,
            coeffs,
        })
    }

    pub fn zero() -> Self {
        Self::constant(Complex64::new(0.0, 0.0))
    }

    pub fn constant(c: Complex64) -> Self {
        Self {
            degree: 0,
            coeffs: vec![c],
        }
    }

    /// `c · z^k`.
    pub fn monomial(k: i64, c: Complex64) -> Self {
        let mut p = Self::zeros(k.unsigned_abs() as usize);
        p.set(k, c);
        p
    }

    /// The zero polynomial stored with the given nominal degree.
    pub fn zeros(degree: usize) -> Self {
        Self {
            degree,
            coeffs: vec![Complex64::new(0.0, 0.0); 2 * degree + 1],
        }
    }

    /// Real coefficient list `c_{-n}, …, c_n`.
    pub fn from_real(coeffs: &[f64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    /// `c_k`, zero outside the stored range.
    pub fn coeff(&self, k: i64) -> Complex64 {
        let n = self.degree as i64;
        if k < -n || k > n {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[(k + n) as usize]
        }
    }

    /// Panics if `|k|` exceeds the stored degree.
    pub fn set(&mut self, k: i64, c: Complex64) {
        let idx = (k + self.degree as i64) as usize;
        self.coeffs[idx] = c;
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.norm_sqr() == 0.0)
    }

    /// Same polynomial stored with a larger nominal degree.
    pub fn padded(&self, degree: usize) -> Self {
        if degree <= self.degree {
            return self.clone();
        }
        let mut out = Self::zeros(degree);
        let shift = degree - self.degree;
        out.coeffs[shift..shift + self.coeffs.len()].copy_from_slice(&self.coeffs);
        out
    }

    /// Drops symmetric pairs of outer coefficients whose moduli are both at most [`TRIM_THRESHOLD`].
    pub fn trimmed(&self) -> Self {
        let mut n = self.degree;
        while n > 0 {
            let lo = self.coeff(-(n as i64)).norm();
            let hi = self.coeff(n as i64).norm();
            if lo > TRIM_THRESHOLD || hi > TRIM_THRESHOLD {
                break;
            }
            n -= 1;
        }
        let shift = self.degree - n;
        Self {
            degree: n,
            coeffs: self.coeffs[shift..shift + 2 * n + 1].to_vec(),
        }
    }

    /// `sum_k c_k e^{ikθ}` by two Horner passes, in `z` for `k >= 0` and in `1/z` for `k < 0`.
    pub fn eval_on_circle(&self, theta: f64) -> Complex64 {
        let z = Complex64::from_polar(1.0, theta);
        let zinv = z.conj();
        let n = self.degree;
        let mut pos = Complex64::new(0.0, 0.0);
        for c in self.coeffs[n..].iter().rev() {
            pos = pos * z + c;
        }
        let mut neg = Complex64::new(0.0, 0.0);
        for c in self.coeffs[..n].iter() {
            neg = (neg + c) * zinv;
        }
        pos + neg
    }

    /// Coefficient convolution; the result has degree `deg p + deg q`.
    pub fn product(&self, other: &Self) -> Self {
        let degree = self.degree + other.degree;
        let mut out = vec![Complex64::new(0.0, 0.0); 2 * degree + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.norm_sqr() == 0.0 {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self { degree, coeffs: out }
    }

    /// The involution `c_k -> conj(c_{-k})`, which is complex conjugation on the circle.
    pub fn star(&self) -> Self {
        Self {
            degree: self.degree,
            coeffs: self.coeffs.iter().rev().map(|c| c.conj()).collect(),
        }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(Complex64::new(s, 0.0))
    }

    /// Reciprocal (`c_k = c_{-k}`), anti-reciprocal (`c_k = -c_{-k}`) and
    /// real-on-circle (`c_k = conj(c_{-k})`) tests at l∞ tolerance `tol`.
    pub fn classify(&self, tol: f64) -> CirclePredicateReport {
        let n = self.degree as i64;
        let (mut rec, mut anti, mut real) = (0.0_f64, 0.0_f64, 0.0_f64);
        for k in 0..=n {
            let a = self.coeff(k);
            let b = self.coeff(-k);
            rec = rec.max((a - b).norm());
            anti = anti.max((a + b).norm());
            real = real.max((a - b.conj()).norm());
        }
        CirclePredicateReport {
            is_real_on_circle: real <= tol,
            is_reciprocal: rec <= tol,
            is_anti_reciprocal: anti <= tol,
            max_deviation: rec.min(anti).min(real),
        }
    }

    /// Maps `sum a_k T_k(x) + sum b_k sin(arccos x) U_{k-1}(x)` (with `x = cos θ`) to
    /// `sum a_k (z^k + z^{-k})/2 + sum b_k (z^k - z^{-k})/(2i)`.
    pub fn from_chebyshev(kind1: &[f64], kind2sin: &[f64]) -> Self {
        let degree = kind1.len().max(kind2sin.len()).saturating_sub(1);
        let mut p = Self::zeros(degree);
        for (k, &a) in kind1.iter().enumerate() {
            if k == 0 {
                p.coeffs[degree] += a;
            } else {
                let half = Complex64::new(a / 2.0, 0.0);
                p.coeffs[degree + k] += half;
                p.coeffs[degree - k] += half;
            }
        }
        // (z^k - z^{-k}) / (2i) = -i/2 z^k + i/2 z^{-k}
        for (k, &b) in kind2sin.iter().enumerate().skip(1) {
            p.coeffs[degree + k] += Complex64::new(0.0, -b / 2.0);
            p.coeffs[degree - k] += Complex64::new(0.0, b / 2.0);
        }
        p
    }

    /// Max of `|p(e^{iθ})|` over a uniform grid. This is a sampled estimate, not a certified bound.
    pub fn linf_on_circle(&self, grid_points: usize) -> Result<f64> {
        check_grid(grid_points, self.degree)?;
        Ok(theta_grid(grid_points)
            .map(|t| self.eval_on_circle(t).norm())
            .fold(0.0, f64::max))
    }

    /// Sum of coefficient moduli, an upper bound for the sup norm on the circle.
    pub fn coeff_l1(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).sum()
    }
}

/// `4·(degree + 1)` is the smallest grid accepted for l∞ estimates.
pub fn min_grid_points(degree: usize) -> usize {
    4 * (degree + 1)
}

pub(crate) fn check_grid(points: usize, degree: usize) -> Result<()> {
    let required = min_grid_points(degree);
    if points < required {
        return Err(Error::GridTooCoarse {
            points,
            degree,
            required,
        });
    }
    Ok(())
}

/// `θ_j = 2πj / points`, `j = 0..points`.
pub fn theta_grid(points: usize) -> impl Iterator<Item = f64> + Clone {
    (0..points).map(move |j| TAU * j as f64 / points as f64)
}

impl Add for &LaurentPolynomial {
    type Output = LaurentPolynomial;

    fn add(self, rhs: Self) -> LaurentPolynomial {
        let degree = self.degree.max(rhs.degree);
        let mut out = self.padded(degree);
        let shift = degree - rhs.degree;
        for (i, c) in rhs.coeffs.iter().enumerate() {
            out.coeffs[shift + i] += c;
        }
        out
    }
}

impl Neg for &LaurentPolynomial {
    type Output = LaurentPolynomial;

    fn neg(self) -> LaurentPolynomial {
        self.scale_real(-1.0)
    }
}

impl Sub for &LaurentPolynomial {
    type Output = LaurentPolynomial;

    fn sub(self, rhs: Self) -> LaurentPolynomial {
        self + &(-rhs)
    }
}

impl Mul for &LaurentPolynomial {
    type Output = LaurentPolynomial;

    fn mul(self, rhs: Self) -> LaurentPolynomial {
        self.product(rhs)
    }
}

#[derive(Serialize, Deserialize)]
struct LaurentRepr {
    kind: String,
    degree: usize,
    coeffs: Vec<[f64; 2]>,
}

impl From<LaurentPolynomial> for LaurentRepr {
    fn from(p: LaurentPolynomial) -> Self {
        LaurentRepr {
            kind: "laurent".into(),
            degree: p.degree,
            coeffs: p.coeffs.iter().map(|c| [c.re, c.im]).collect(),
        }
    }
}

impl TryFrom<LaurentRepr> for LaurentPolynomial {
    type Error = Error;

    fn try_from(r: LaurentRepr) -> Result<Self> {
        if r.kind != "laurent" {
            return Err(Error::Invalid(format!("expected kind \"laurent\", got {:?}", r.kind)));
        }
        if r.coeffs.len() != 2 * r.degree + 1 {
            return Err(Error::Invalid(format!(
                "degree {} needs {} coefficients, got {}",
                r.degree,
                2 * r.degree + 1,
                r.coeffs.len()
            )));
        }
        Ok(Self {
            degree: r.degree,
            coeffs: r.coeffs.iter().map(|&[re, im]| Complex64::new(re, im)).collect(),
        })
    }
}
