//! Sparse random Fourier targets `sum a_{2j} cos 2jθ + i sum b_{2j+1} sin (2j+1)θ`.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{domain, Result};
use crate::laurent::{theta_grid, LaurentPolynomial};

use super::{Family, TargetMeta, TargetPair};

/// Safety factor on the sampled maximum before rescaling to `1/2`.
const NORM_SAFETY: f64 = 1e-3;

/// `nz = min(n/10, 40)`.
pub fn random_nonzeros(n: usize) -> usize {
    (n / 10).min(40)
}

fn draw_positive(rng: &mut ChaCha8Rng) -> f64 {
    loop {
        let v: f64 = rng.gen();
        if v > 0.0 {
            return v;
        }
    }
}

/// Random pair of degree `n` with `nz` nonzero Chebyshev coefficients, `|A + iB| < 1/2`.
///
/// Half of the coefficients (rounded up) go to even cosine slots of `A`, with the degree-`n`
/// slot always occupied; the rest go to odd sine slots of `B`. Slots are drawn without
/// replacement and values uniformly from `(0, 1)`.
pub fn build_random(n: usize, seed: u64) -> Result<TargetPair> {
    if n % 2 != 0 || n < 20 {
        return domain(format!("random targets need an even degree n >= 20, got {n}"));
    }
    let nz = random_nonzeros(n);
    let n_a = nz.div_ceil(2);
    let n_b = nz - n_a;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut kind1 = vec![0.0; n + 1];
    kind1[n] = draw_positive(&mut rng);
    // the n/2 even slots below the top: 0, 2, …, n-2
    for slot in sample(&mut rng, n / 2, n_a - 1).into_vec() {
        kind1[2 * slot] = draw_positive(&mut rng);
    }
    let mut kind2 = vec![0.0; n];
    // the n/2 odd slots: 1, 3, …, n-1
    for slot in sample(&mut rng, n / 2, n_b).into_vec() {
        kind2[2 * slot + 1] = draw_positive(&mut rng);
    }

    let a = LaurentPolynomial::from_chebyshev(&kind1, &[]);
    let b = LaurentPolynomial::from_chebyshev(&[], &kind2).padded(n);
    let points = 16 * (n + 1);
    let peak = theta_grid(points)
        .map(|t| {
            let (x, y) = (a.eval_on_circle(t).re, b.eval_on_circle(t).re);
            x.hypot(y)
        })
        .fold(0.0, f64::max);
    let scale = 1.0 / (2.0 * peak * (1.0 + NORM_SAFETY));
    let mut meta = TargetMeta::new(Family::Random, 0.5);
    meta.seed = Some(seed);
    TargetPair::new(a.scale_real(scale), b.scale_real(scale), meta)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nonzero_inputs(p: &TargetPair) -> usize {
        let n = p.degree() as i64;
        (0..=n)
            .filter(|&k| p.a().coeff(k).norm() > 0.0 || p.b().coeff(k).norm() > 0.0)
            .count()
    }

    #[test]
    fn counts_follow_formula() {
        assert_eq!(random_nonzeros(400), 40);
        assert_eq!(random_nonzeros(100), 10);
        assert_eq!(random_nonzeros(2000), 40);
        for (n, seed) in [(100, 7), (400, 1), (20, 3), (22, 4)] {
            let p = build_random(n, seed).unwrap();
            assert_eq!(p.degree(), n);
            assert_eq!(nonzero_inputs(&p), random_nonzeros(n));
            assert!(p.a().coeff(n as i64).norm() > 0.0);
            assert!(p.sampled_norm_sq_max(32 * (n + 1)).sqrt() <= 0.5);
        }
    }

    #[test]
    fn classes_and_determinism() {
        let p = build_random(200, 11).unwrap();
        assert!(p.a().classify(0.0).is_reciprocal);
        assert!(p.b().classify(1e-300).is_anti_reciprocal);
        let q = build_random(200, 11).unwrap();
        assert_eq!(serde_json::to_string(&p).unwrap(), serde_json::to_string(&q).unwrap());
        assert_ne!(p, build_random(200, 12).unwrap());
    }

    #[test]
    fn rejects_bad_degrees() {
        assert!(build_random(101, 0).is_err());
        assert!(build_random(18, 0).is_err());
    }
}
