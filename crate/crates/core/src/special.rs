//! Bessel functions of integer order by Miller's downward recurrence, plus log-gamma helpers.
//!
//! `J_n` is normalised with `J_0^2 + 2 sum J_k^2 = 1` (all terms positive, no cancellation) and
//! its sign fixed by `J_0 + 2 sum J_{2k} = 1`. The scaled `e^{-x} I_n` uses
//! `e^{-x}(I_0 + 2 sum I_k) = 1`, which already carries the exponential scale.

use crate::error::{Error, Result};

pub const MAX_ORDER: usize = 100_000;
pub const MAX_ARG: f64 = 10_000.0;

// Small enough that sums of squares of the unnormalised values stay finite.
const RESCALE_ABOVE: f64 = 1e100;
const RESCALE_BY: f64 = 1e-100;

fn check_range(order: usize, x: f64) -> Result<()> {
    if !(0.0..=MAX_ARG).contains(&x) || order > MAX_ORDER {
        return Err(Error::RangeUnsupported(format!(
            "Bessel order {order}, argument {x} (supported: order <= {MAX_ORDER}, 0 <= x <= {MAX_ARG})"
        )));
    }
    Ok(())
}

/// Starting index for the downward recurrence of `J`; beyond the turning point `k ≈ x`
/// the values decay super-exponentially.
fn start_index_j(order: usize, x: f64) -> usize {
    let l = (order as f64).max(x);
    let m = (l + 30.0 + (60.0 * l).sqrt()).ceil() as usize;
    m + (m & 1)
}

fn start_index_i(order: usize, x: f64) -> usize {
    order + 40 + (1500.0 * x).sqrt().ceil() as usize
}

/// Bring the unnormalised values to unit scale so the normalising sums neither overflow nor
/// underflow.
fn rescale_to_unit_max(vals: &mut [f64]) {
    let big = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if big > 0.0 {
        for v in vals {
            *v /= big;
        }
    }
}

/// `J_0(x), …, J_{max_order}(x)`.
pub fn bessel_j_all(max_order: usize, x: f64) -> Result<Vec<f64>> {
    check_range(max_order, x)?;
    let mut out = vec![0.0; max_order + 1];
    if x == 0.0 {
        out[0] = 1.0;
        return Ok(out);
    }
    let m = start_index_j(max_order, x);
    let mut vals = vec![0.0; m + 2];
    vals[m] = 1e-280;
    for k in (1..=m).rev() {
        let next = (2.0 * k as f64 / x) * vals[k] - vals[k + 1];
        vals[k - 1] = next;
        if next.abs() > RESCALE_ABOVE {
            for v in &mut vals[k - 1..=m] {
                *v *= RESCALE_BY;
            }
        }
    }
    rescale_to_unit_max(&mut vals);
    let mut sum_sq = vals[0] * vals[0];
    let mut sum_even = vals[0];
    for (k, v) in vals.iter().enumerate().take(m + 1).skip(1) {
        sum_sq += 2.0 * v * v;
        if k % 2 == 0 {
            sum_even += 2.0 * v;
        }
    }
    let norm = sum_sq.sqrt().copysign(sum_even);
    for (o, v) in out.iter_mut().zip(&vals) {
        *o = v / norm;
    }
    Ok(out)
}

pub fn bessel_j(order: usize, x: f64) -> Result<f64> {
    Ok(bessel_j_all(order, x)?[order])
}

/// `e^{-x} I_0(x), …, e^{-x} I_{max_order}(x)` for `x >= 0`.
pub fn bessel_i_scaled_all(max_order: usize, x: f64) -> Result<Vec<f64>> {
    check_range(max_order, x)?;
    Ok(i_scaled_miller(max_order, x))
}

/// Same recurrence without the range guard; the log-magnitude analysis needs arguments past
/// [`MAX_ARG`], where the recurrence remains stable but is not covered by the accuracy tests.
pub(crate) fn i_scaled_miller(max_order: usize, x: f64) -> Vec<f64> {
    let mut out = vec![0.0; max_order + 1];
    if x == 0.0 {
        out[0] = 1.0;
        return out;
    }
    let m = start_index_i(max_order, x);
    let mut vals = vec![0.0; m + 2];
    vals[m] = 1e-280;
    for k in (1..=m).rev() {
        let next = (2.0 * k as f64 / x) * vals[k] + vals[k + 1];
        vals[k - 1] = next;
        if next > RESCALE_ABOVE {
            for v in &mut vals[k - 1..=m] {
                *v *= RESCALE_BY;
            }
        }
    }
    rescale_to_unit_max(&mut vals);
    let total: f64 = vals[0] + 2.0 * vals[1..=m].iter().sum::<f64>();
    for (o, v) in out.iter_mut().zip(&vals) {
        *o = v / total;
    }
    out
}

pub fn bessel_i_scaled(order: usize, x: f64) -> Result<f64> {
    Ok(bessel_i_scaled_all(order, x)?[order])
}

pub fn ln_gamma(x: f64) -> f64 {
    statrs::function::gamma::ln_gamma(x)
}

/// `ln C(n, k)`.
pub fn ln_binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0)
}

/// `ln(e^a + e^b)` without overflow.
pub(crate) fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}
