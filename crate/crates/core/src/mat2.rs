//! 2×2 complex matrices.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Row-major 2×2 complex matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2(pub [[Complex64; 2]; 2]);

impl Mat2 {
    pub const ZERO: Mat2 = Mat2([[ZERO, ZERO], [ZERO, ZERO]]);
    pub const IDENTITY: Mat2 = Mat2([[ONE, ZERO], [ZERO, ONE]]);
    pub const X: Mat2 = Mat2([[ZERO, ONE], [ONE, ZERO]]);
    pub const Y: Mat2 = Mat2([[ZERO, Complex64::new(0.0, -1.0)], [I, ZERO]]);
    pub const Z: Mat2 = Mat2([[ONE, ZERO], [ZERO, Complex64::new(-1.0, 0.0)]]);

    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Self {
        Mat2([[a, b], [c, d]])
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let m = &self.0;
        Mat2([[s * m[0][0], s * m[0][1]], [s * m[1][0], s * m[1][1]]])
    }

    pub fn adjoint(&self) -> Self {
        let m = &self.0;
        Mat2([[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]])
    }

    pub fn det(&self) -> Complex64 {
        let m = &self.0;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    pub fn trace(&self) -> Complex64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn frobenius(&self) -> f64 {
        self.0.iter().flatten().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest singular value.
    pub fn op_norm(&self) -> f64 {
        let (hi, _) = self.singular_values();
        hi
    }

    /// `(σ_max, σ_min)` from `σ_max² + σ_min² = ‖M‖_F²` and `σ_max σ_min = |det M|`.
    pub fn singular_values(&self) -> (f64, f64) {
        let f = self.frobenius();
        if f == 0.0 {
            return (0.0, 0.0);
        }
        // scale first so the squares cannot under- or overflow
        let d = self.det().norm() / (f * f);
        let disc = (1.0 - 4.0 * d * d).max(0.0).sqrt();
        let hi = ((1.0 + disc) / 2.0).sqrt();
        let lo = if hi > 0.0 { d / hi } else { 0.0 };
        (f * hi, f * lo)
    }

    /// Unit vector spanning the dominant right singular direction, phase fixed so that the
    /// larger component is real and positive.
    pub fn dominant_right_vector(&self) -> [Complex64; 2] {
        let f = self.frobenius();
        let m = if f > 0.0 { self.scale(Complex64::new(1.0 / f, 0.0)) } else { *self };
        let h = m.adjoint() * m;
        let (h11, h22, h12) = (h.0[0][0].re, h.0[1][1].re, h.0[0][1]);
        let half = 0.5 * (h11 - h22);
        let lam = 0.5 * (h11 + h22) + half.hypot(h12.norm());
        let v = if h11 >= h22 {
            [Complex64::new(lam - h22, 0.0), h12.conj()]
        } else {
            [h12, Complex64::new(lam - h11, 0.0)]
        };
        let norm = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
        if norm == 0.0 {
            return [ONE, ZERO];
        }
        let big = if v[0].norm() >= v[1].norm() { v[0] } else { v[1] };
        let phase = big.conj() / big.norm();
        [v[0] * phase / norm, v[1] * phase / norm]
    }

    pub fn inverse(&self) -> Option<Self> {
        let d = self.det();
        if d.norm() == 0.0 {
            return None;
        }
        let m = &self.0;
        Some(Mat2([[m[1][1] / d, -m[0][1] / d], [-m[1][0] / d, m[0][0] / d]]))
    }

    /// Nearest unitary in the Frobenius norm (unitary polar factor); identity for a zero input.
    pub fn polar_unitary(&self) -> Self {
        // M = U H with H = sqrt(M†M) = (M†M + sqrt(det M†M) I) / sqrt(tr M†M + 2 sqrt(det M†M))
        let f = self.frobenius();
        if f == 0.0 {
            return Mat2::IDENTITY;
        }
        let m = self.scale(Complex64::new(1.0 / f, 0.0));
        let g = m.adjoint() * m;
        let s = g.det().re.max(0.0).sqrt();
        let t = (g.trace().re + 2.0 * s).sqrt();
        let h = (g + Mat2::IDENTITY.scale(Complex64::new(s, 0.0))).scale(Complex64::new(1.0 / t, 0.0));
        match h.inverse() {
            Some(hi) if s > 0.0 => m * hi,
            _ => {
                // rank one: complete the image direction to a unitary
                let v = m.dominant_right_vector();
                let u = m.mul_vec(v);
                let un = (u[0].norm_sqr() + u[1].norm_sqr()).sqrt();
                let u = [u[0] / un, u[1] / un];
                outer(u, v) + outer([-u[1].conj(), u[0].conj()], [-v[1].conj(), v[0].conj()])
            }
        }
    }

    pub fn mul_vec(&self, v: [Complex64; 2]) -> [Complex64; 2] {
        let m = &self.0;
        [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
    }

    /// `‖M†M - I‖` in the operator norm.
    pub fn unitarity_defect(&self) -> f64 {
        (self.adjoint() * *self - Mat2::IDENTITY).op_norm()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|c| c.re.is_finite() && c.im.is_finite())
    }
}

/// `u v†`.
pub fn outer(u: [Complex64; 2], v: [Complex64; 2]) -> Mat2 {
    Mat2([[u[0] * v[0].conj(), u[0] * v[1].conj()], [u[1] * v[0].conj(), u[1] * v[1].conj()]])
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, o: Mat2) -> Mat2 {
        let (a, b) = (&self.0, &o.0);
        Mat2([[a[0][0] + b[0][0], a[0][1] + b[0][1]], [a[1][0] + b[1][0], a[1][1] + b[1][1]]])
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, o: Mat2) -> Mat2 {
        let (a, b) = (&self.0, &o.0);
        Mat2([[a[0][0] - b[0][0], a[0][1] - b[0][1]], [a[1][0] - b[1][0], a[1][1] - b[1][1]]])
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, o: Mat2) -> Mat2 {
        let (a, b) = (&self.0, &o.0);
        Mat2([
            [a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
            [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]],
        ])
    }
}

// row-major [[re, im] × 4]
impl Serialize for Mat2 {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let flat: Vec<[f64; 2]> = self.0.iter().flatten().map(|c| [c.re, c.im]).collect();
        flat.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Mat2 {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let flat = <[[f64; 2]; 4]>::deserialize(d)?;
        let c = |i: usize| Complex64::new(flat[i][0], flat[i][1]);
        Ok(Mat2([[c(0), c(1)], [c(2), c(3)]]))
    }
}
