//! Matrix-valued Laurent polynomial `F(w) = A I + iB σ_X + iC σ_Y + iD σ_Z` in `w = e^{iθ/2}` and
//! its factorisation `F(w) = E_0 E_{p_1}(w) ⋯ E_{p_m}(w)` with `E_p(w) = w^{-1} p + w (I - p)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::completion::CompletedQuadruple;
use crate::error::{Error, Result};
use crate::mat2::{outer, Mat2};

/// Relative size below which a leading coefficient is treated as noise.
pub const LEAD_THRESHOLD: f64 = 1e-16;
/// Largest sampled unitarity deviation accepted by [`assemble_matrix_poly`].
pub const MAX_EPS_COEFF: f64 = 1e-6;

const IM: Complex64 = Complex64::new(0.0, 1.0);

/// Coefficients `C_k` on the support `k = -m, -m+2, …, m` (index `j` holds `k = -m + 2j`).
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixCoefficientList {
    pub half_degree: usize,
    pub coeffs: Vec<Mat2>,
    /// Sampled `max ‖F F† - I‖` on `max(4m, 8)` points of the circle.
    pub eps_coeff: f64,
}

impl MatrixCoefficientList {
    pub fn new(coeffs: Vec<Mat2>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Invalid("matrix polynomial needs at least one coefficient".into()));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFiniteCoefficient("matrix polynomial".into()));
        }
        let mut out = Self { half_degree: coeffs.len() - 1, coeffs, eps_coeff: 0.0 };
        out.eps_coeff = out.sampled_unitarity(out.sample_points());
        Ok(out)
    }

    fn sample_points(&self) -> usize {
        (4 * self.half_degree).max(8)
    }

    /// `F(w) = sum_j C_j w^{-m + 2j}`.
    pub fn eval(&self, w: Complex64) -> Mat2 {
        let w2 = w * w;
        let mut pow = w.powi(-(self.half_degree as i32));
        let mut acc = Mat2::ZERO;
        for c in &self.coeffs {
            acc = acc + c.scale(pow);
            pow *= w2;
        }
        acc
    }

    /// `max ‖F(w) F(w)† - I‖` over `points` equispaced `w` on the full circle.
    pub fn sampled_unitarity(&self, points: usize) -> f64 {
        circle(points).map(|w| self.eval(w).adjoint().unitarity_defect()).fold(0.0, f64::max)
    }
}

/// `points` equispaced values `e^{2πij/points}`.
pub fn circle(points: usize) -> impl Iterator<Item = Complex64> {
    (0..points).map(move |j| Complex64::from_polar(1.0, 2.0 * PI * j as f64 / points as f64))
}

/// Rank-one projector `v v†`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Projector {
    pub v: [Complex64; 2],
}

impl Projector {
    /// Normalises `v`.
    pub fn new(v: [Complex64; 2]) -> Result<Self> {
        let n = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::Invalid("projector vector must be nonzero and finite".into()));
        }
        Ok(Self { v: [v[0] / n, v[1] / n] })
    }

    pub fn matrix(&self) -> Mat2 {
        outer(self.v, self.v)
    }

    pub fn complement(&self) -> Mat2 {
        Mat2::IDENTITY - self.matrix()
    }

    /// `E_p(w) = w^{-1} p + w (I - p)`.
    pub fn factor(&self, w: Complex64) -> Mat2 {
        self.matrix().scale(w.inv()) + self.complement().scale(w)
    }

    /// `V = [[α, -β̄], [β, ᾱ]]` with `V|0⟩ = v = (α, β)`.
    pub fn unitary(&self) -> Mat2 {
        let [a, b] = self.v;
        Mat2::new(a, -b.conj(), b, a.conj())
    }
}

impl Serialize for Projector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [[self.v[0].re, self.v[0].im], [self.v[1].re, self.v[1].im]].serialize(s)
    }
}

impl<'de> Deserialize<'de> for Projector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = <[[f64; 2]; 2]>::deserialize(d)?;
        Projector::new([Complex64::new(raw[0][0], raw[0][1]), Complex64::new(raw[1][0], raw[1][1])])
            .map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QspSequence {
    #[serde(rename = "E0")]
    pub e0: Mat2,
    /// `p_1, …, p_m` in product order after `E_0`.
    pub projectors: Vec<Projector>,
    pub truncation_error: f64,
    pub source_degree: usize,
}

impl QspSequence {
    /// `E_0 E_{p_1}(w) ⋯ E_{p_m}(w)`.
    pub fn eval(&self, w: Complex64) -> Mat2 {
        self.projectors.iter().fold(self.e0, |acc, p| acc * p.factor(w))
    }

    /// Coefficient list of the product.
    pub fn expand(&self) -> Result<MatrixCoefficientList> {
        let mut coeffs = vec![self.e0];
        for p in &self.projectors {
            let (pm, qm) = (p.matrix(), p.complement());
            // w^{-1} p lowers each power by one, w q raises it
            let mut next = vec![Mat2::ZERO; coeffs.len() + 1];
            for (j, c) in coeffs.iter().enumerate() {
                next[j] = next[j] + *c * pm;
                next[j + 1] = next[j + 1] + *c * qm;
            }
            coeffs = next;
        }
        MatrixCoefficientList::new(coeffs)
    }
}

/// Coefficient at `w^{2l}` is `a_l I + i b_l σ_X + i c_l σ_Y + i d_l σ_Z`, `l = -n..=n`.
pub fn assemble_matrix_poly(q: &CompletedQuadruple) -> Result<MatrixCoefficientList> {
    let n = [&q.a, &q.b, &q.c, &q.d].iter().map(|p| p.degree()).max().unwrap_or(0);
    let coeffs: Vec<Mat2> = (-(n as i64)..=n as i64)
        .map(|l| {
            Mat2::IDENTITY.scale(q.a.coeff(l))
                + Mat2::X.scale(IM * q.b.coeff(l))
                + Mat2::Y.scale(IM * q.c.coeff(l))
                + Mat2::Z.scale(IM * q.d.coeff(l))
        })
        .collect();
    // support {-2n, -2n+2, …, 2n} in w: exactly the list above
    let list = MatrixCoefficientList::new(coeffs)?;
    if list.eps_coeff > MAX_EPS_COEFF {
        return Err(Error::NotUnitary(list.eps_coeff));
    }
    Ok(list)
}

/// Projector onto the dominant right singular direction of `lead` (the row support of a rank-one
/// matrix). Refuses leads whose norm is not above `threshold`.
pub fn extract_projector_with(lead: &Mat2, threshold: f64) -> Result<Projector> {
    let norm = lead.op_norm();
    if !(norm > threshold) {
        return Err(Error::LeadTooSmall { step: 0, norm, threshold });
    }
    Projector::new(lead.dominant_right_vector())
}

/// [`extract_projector_with`] at threshold zero.
pub fn extract_projector(lead: &Mat2) -> Result<Projector> {
    extract_projector_with(lead, 0.0)
}

/// Right-multiply by `E_p(w)† = w p + w^{-1} (I - p)` and drop the two coefficients that leave
/// the support `|k| <= m - 1`. Returns the reduced list and the sum of the dropped norms.
pub fn peel(f: &MatrixCoefficientList, p: &Projector) -> (MatrixCoefficientList, f64) {
    let m = f.half_degree;
    assert!(m >= 1, "peel needs half degree at least 1");
    let (pm, qm) = (p.matrix(), p.complement());
    let c = &f.coeffs;
    let coeffs: Vec<Mat2> = (0..m).map(|j| c[j] * pm + c[j + 1] * qm).collect();
    let dropped = (c[0] * qm).op_norm() + (c[m] * pm).op_norm();
    let reduced = MatrixCoefficientList { half_degree: m - 1, coeffs, eps_coeff: f.eps_coeff };
    (reduced, dropped)
}

/// Peel `m` projectors and snap the constant remainder to its polar unitary.
///
/// Each step reads `p` off whichever end coefficient is larger: `C_{-m} = C_{-m} p` gives `p`
/// as its row support, `C_m = C_m (I - p)` gives the complement. Both determine the same factor.
pub fn decompose(f: &MatrixCoefficientList) -> Result<QspSequence> {
    let mut cur = f.clone();
    let mut peeled = Vec::with_capacity(f.half_degree);
    let mut truncation_error = 0.0;
    for step in 0..f.half_degree {
        let m = cur.half_degree;
        let scale = cur.coeffs.iter().map(|c| c.op_norm()).fold(0.0, f64::max);
        let threshold = LEAD_THRESHOLD * scale;
        let (lo, hi) = (cur.coeffs[0].op_norm(), cur.coeffs[m].op_norm());
        let p = if lo >= hi {
            extract_projector_with(&cur.coeffs[0], threshold)
        } else {
            extract_projector_with(&cur.coeffs[m], threshold)
                .and_then(|q| Projector::new([-q.v[1].conj(), q.v[0].conj()]))
        }
        .map_err(|e| match e {
            Error::LeadTooSmall { norm, threshold, .. } => Error::LeadTooSmall { step, norm, threshold },
            other => other,
        })?;
        let (next, dropped) = peel(&cur, &p);
        truncation_error += dropped;
        peeled.push(p);
        cur = next;
    }
    let rest = cur.coeffs[0];
    let e0 = rest.polar_unitary();
    truncation_error += (e0 - rest).op_norm();
    peeled.reverse();
    Ok(QspSequence { e0, projectors: peeled, truncation_error, source_degree: f.half_degree / 2 })
}

/// Gate train `E_0, V_1, V_1† V_2, …, V_{m-1}† V_m, V_m†`, where `E_{p_k}(w) = V_k diag(w^{-1}, w) V_k†`.
pub fn export_gates(seq: &QspSequence) -> Vec<Mat2> {
    let vs: Vec<Mat2> = seq.projectors.iter().map(|p| p.unitary()).collect();
    let mut gates = vec![seq.e0];
    if let (Some(first), Some(last)) = (vs.first(), vs.last()) {
        gates.push(*first);
        for pair in vs.windows(2) {
            gates.push(pair[0].adjoint() * pair[1]);
        }
        gates.push(last.adjoint());
    }
    gates
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateList {
    pub gates: Vec<Mat2>,
}

/// Seeded sequence of `len` projectors with a random `E_0`, for round-trip tests. Entries are
/// drawn uniformly from the unit box and normalised.
pub fn random_sequence(len: usize, seed: u64) -> QspSequence {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut entry = || Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    let e0 = Mat2::new(entry(), entry(), entry(), entry()).polar_unitary();
    let projectors = (0..len).map(|_| Projector::new([entry(), entry()]).expect("nonzero draw")).collect();
    QspSequence { e0, projectors, truncation_error: 0.0, source_degree: len / 2 }
}
