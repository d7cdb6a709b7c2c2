//! Chebyshev-series utilities on `[-1, 1]`.

use std::f64::consts::PI;

/// `sum_k c_k T_k(x)` by Clenshaw's recurrence.
pub fn clenshaw(coeffs: &[f64], x: f64) -> f64 {
    let (mut b1, mut b2) = (0.0, 0.0);
    for &c in coeffs.iter().skip(1).rev() {
        let b0 = 2.0 * x * b1 - b2 + c;
        b2 = b1;
        b1 = b0;
    }
    match coeffs.first() {
        Some(&c0) => x * b1 - b2 + c0,
        None => 0.0,
    }
}

/// Chebyshev coefficients `c_0..c_degree` of the degree-`degree` interpolant of `f` at the
/// `degree + 1` Chebyshev points of the first kind (a discrete cosine transform of the samples).
pub fn interpolate<F: Fn(f64) -> f64>(f: F, degree: usize) -> Vec<f64> {
    let n = degree + 1;
    let samples: Vec<f64> = (0..n)
        .map(|j| f((PI * (j as f64 + 0.5) / n as f64).cos()))
        .collect();
    // cos(π k (2j+1) / (2n)) depends only on k(2j+1) mod 4n.
    let period = 4 * n;
    let table: Vec<f64> = (0..period)
        .map(|i| (PI * i as f64 / (2 * n) as f64).cos())
        .collect();
    let scale = 2.0 / n as f64;
    (0..n)
        .map(|k| {
            let mut acc = 0.0;
            let step = (2 * k) % period;
            // idx tracks k(2j+1) mod 4n
            let mut idx = k % period;
            for s in &samples {
                acc += s * table[idx];
                idx += step;
                if idx >= period {
                    idx -= period;
                }
            }
            let c = acc * scale;
            if k == 0 {
                c / 2.0
            } else {
                c
            }
        })
        .collect()
}

/// Product of two Chebyshev series via `T_a T_b = (T_{a+b} + T_{|a-b|}) / 2`.
pub fn product(p: &[f64], q: &[f64]) -> Vec<f64> {
    if p.is_empty() || q.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0.0; p.len() + q.len() - 1];
    for (i, &a) in p.iter().enumerate() {
        if a == 0.0 {
            continue;
        }
        for (j, &b) in q.iter().enumerate() {
            let half = 0.5 * a * b;
            out[i + j] += half;
            out[i.abs_diff(j)] += half;
        }
    }
    out
}

/// `sup_x |f|` sampled on `points` uniformly spaced points of `[-1, 1]`.
pub fn sampled_sup(coeffs: &[f64], points: usize) -> f64 {
    (0..points)
        .map(|i| -1.0 + 2.0 * i as f64 / (points - 1) as f64)
        .map(|x| clenshaw(coeffs, x).abs())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clenshaw_matches_trig_definition() {
        let c = [0.5, -1.0, 0.25, 2.0];
        for &x in &[-1.0, -0.3, 0.0, 0.8, 1.0] {
            let th = f64::acos(x);
            let direct: f64 = c.iter().enumerate().map(|(k, a)| a * (k as f64 * th).cos()).sum();
            assert!((clenshaw(&c, x) - direct).abs() < 1e-14);
        }
        assert_eq!(clenshaw(&[], 0.3), 0.0);
    }

    #[test]
    fn interpolation_reproduces_polynomials() {
        let c = [0.1, 0.0, -0.7, 0.3, 0.05];
        let got = interpolate(|x| clenshaw(&c, x), 4);
        for (a, b) in got.iter().zip(&c) {
            assert!((a - b).abs() < 1e-15);
        }
        let padded = interpolate(|x| clenshaw(&c, x), 9);
        assert!(padded[5..].iter().all(|v| v.abs() < 1e-15));
    }

    #[test]
    fn product_matches_pointwise() {
        let p = [0.2, 1.0, -0.5];
        let q = [1.0, 0.0, 0.0, 0.3];
        let pq = product(&p, &q);
        for &x in &[-0.9, 0.1, 0.6] {
            assert!((clenshaw(&pq, x) - clenshaw(&p, x) * clenshaw(&q, x)).abs() < 1e-14);
        }
    }
}
