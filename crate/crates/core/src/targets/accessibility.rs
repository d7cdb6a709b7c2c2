//! Floating-point accessibility of target coefficient lists.
//!
//! The question is whether the coefficients of a target in the power basis of `x` fit in
//! binary64. They are computed in log-magnitude form so that nothing overflows:
//!
//! * threshold: `T_{2k}(s)` with `s² = (x² - Δ²)/(1 - Δ²)`. Every term of the expansion in `x²`
//!   has the same sign, so the log-sum-exp below gives the coefficients exactly.
//! * rect, sign, erf, inverse, matrix inversion: Chebyshev series composed with an affine map.
//!   Here the magnitudes are the triangle-inequality bounds
//!   `sum_j |c_j| |t_{j,r}| C(r,m) |α|^m |β|^{r-m}`, with `t_{j,r}` the power coefficients of `T_j`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

use super::inverse::{eps_rect, inverse_chebyshev, inverse_params, mi_rect_params};
use super::sign::{erf_chebyshev_unchecked, erf_degree, sign_params};
use super::threshold::threshold_k;

/// `log10` of the largest finite binary64 value.
pub const LOG10_F64_MAX: f64 = 308.2547155599167;

/// Half-width used for rect accessibility sweeps.
pub const RECT_T: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AccessibilityCell {
    pub param: f64,
    pub log10_inv_eps: u32,
    pub max_log10_coeff: f64,
    pub min_log10_nonzero_coeff: f64,
    pub overflow: bool,
    pub dynamic_range_digits: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AccessibilityFamily {
    Rect,
    Threshold,
}

impl AccessibilityFamily {
    pub fn name(self) -> &'static str {
        match self {
            AccessibilityFamily::Rect => "rect",
            AccessibilityFamily::Threshold => "threshold",
        }
    }
}

/// `ln n!` for `n` up to a fixed size.
pub(crate) struct LnFactorials(Vec<f64>);

impl LnFactorials {
    pub(crate) fn new(max: usize) -> Self {
        let mut v = Vec::with_capacity(max + 1);
        v.push(0.0);
        let mut acc = 0.0;
        for i in 1..=max {
            acc += (i as f64).ln();
            v.push(acc);
        }
        Self(v)
    }

    fn binom(&self, n: usize, k: usize) -> f64 {
        self.0[n] - self.0[k] - self.0[n - k]
    }

    /// `ln |t_{n,r}|`, the power coefficient of `x^r` in `T_n(x)`, or `-inf` if it is zero.
    pub(crate) fn cheb_power(&self, n: usize, r: usize) -> f64 {
        if r > n || (n - r) % 2 == 1 {
            return f64::NEG_INFINITY;
        }
        if n == 0 {
            return 0.0;
        }
        let s = (n - r) / 2;
        // |t_{n,n-2s}| = n/(n-s) C(n-s, s) 2^{n-2s-1}
        (n as f64).ln() - ((n - s) as f64).ln() + self.binom(n - s, s)
            + (r as f64 - 1.0) * std::f64::consts::LN_2
    }
}

/// `ln sum exp(v)` over finite entries; `-inf` when there are none.
fn log_sum_exp(v: &[f64]) -> f64 {
    let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + v.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

/// `ln sum_j |c_j| |t_{j,r}|` for every power `r`.
pub(crate) fn ln_power_weights(tab: &LnFactorials, cheb: &[f64]) -> Vec<f64> {
    let n = cheb.len().saturating_sub(1);
    let ln_c: Vec<f64> = cheb.iter().map(|c| c.abs().ln()).collect();
    (0..=n)
        .into_par_iter()
        .map(|r| {
            let terms: Vec<f64> = (r..=n)
                .step_by(2)
                .filter(|&j| ln_c[j] > f64::NEG_INFINITY)
                .map(|j| ln_c[j] + tab.cheb_power(j, r))
                .collect();
            log_sum_exp(&terms)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Gap {
    All,
    /// Only `r - m` odd contributes (difference of the `+β` and `-β` shifts).
    Odd,
}

/// Magnitudes after substituting `y = αx + β` into `sum_r W_r y^r`:
/// `ln sum_r W_r C(r,m) |α|^m |β|^{r-m}`.
pub(crate) fn ln_compose(tab: &LnFactorials, ln_w: &[f64], alpha: f64, beta: f64, gap: Gap) -> Vec<f64> {
    let ln_a = alpha.abs().ln();
    let ln_b = beta.abs().ln();
    let n = ln_w.len().saturating_sub(1);
    if beta == 0.0 {
        return ln_w
            .iter()
            .enumerate()
            .map(|(m, &w)| if gap == Gap::Odd { f64::NEG_INFINITY } else { w + m as f64 * ln_a })
            .collect();
    }
    (0..=n)
        .into_par_iter()
        .map(|m| {
            let step = if gap == Gap::Odd { 2 } else { 1 };
            let start = if gap == Gap::Odd { m + 1 } else { m };
            let base = m as f64 * ln_a - tab.0[m];
            let mut buf = Vec::with_capacity((n + 1 - m.min(n)) / step + 1);
            let mut r = start;
            while r <= n {
                let w = ln_w[r];
                if w > f64::NEG_INFINITY {
                    let d = r - m;
                    buf.push(w + tab.0[r] - tab.0[d] + d as f64 * ln_b);
                }
                r += step;
            }
            base + log_sum_exp(&buf)
        })
        .collect()
}

/// Summarise natural-log magnitudes into a cell.
pub(crate) fn cell_from_ln(param: f64, log10_inv_eps: u32, ln_coeffs: &[f64]) -> AccessibilityCell {
    let ln10 = std::f64::consts::LN_10;
    let finite = ln_coeffs.iter().copied().filter(|v| v.is_finite());
    let (mut max, mut min) = (f64::NEG_INFINITY, f64::INFINITY);
    for v in finite {
        max = max.max(v);
        min = min.min(v);
    }
    let (max, min) = (max / ln10, min / ln10);
    AccessibilityCell {
        param,
        log10_inv_eps,
        max_log10_coeff: max,
        min_log10_nonzero_coeff: min,
        overflow: max > LOG10_F64_MAX,
        dynamic_range_digits: max - min,
    }
}

fn eps_axis(eps: f64) -> u32 {
    (1.0 / eps).log10().round().max(0.0) as u32
}

/// `ln cosh z` for `z >= 0`.
pub(crate) fn ln_cosh(z: f64) -> f64 {
    z + (-2.0 * z).exp().ln_1p() - std::f64::consts::LN_2
}

/// Log-magnitudes of the threshold polynomial's coefficients of `x^{2m}`, `m = 0..=k`.
pub(crate) fn threshold_ln_coeffs(delta: f64, eps: f64) -> Result<Vec<f64>> {
    let k = threshold_k(delta, eps)?;
    let tab = LnFactorials::new(2 * k + 1);
    let d2 = delta * delta;
    let ln_denom = ln_cosh(2.0 * k as f64 * (delta / (1.0 - d2).sqrt()).asinh());
    let ln_w: Vec<f64> = (0..=k).map(|r| tab.cheb_power(2 * k, 2 * r) - ln_denom).collect();
    Ok(ln_compose(&tab, &ln_w, 1.0 / (1.0 - d2), -d2 / (1.0 - d2), Gap::All))
}

pub fn threshold_cell(delta: f64, eps: f64) -> Result<AccessibilityCell> {
    Ok(cell_from_ln(delta, eps_axis(eps), &threshold_ln_coeffs(delta, eps)?))
}

/// Log-magnitude bounds for `p_erf((x - a)/2, 2k, n)` (`gap = All`) or the rect difference
/// `½(p((x + a)/2) - p((x - a)/2))` (`gap = Odd`).
fn shifted_erf_ln_coeffs(a: f64, kappa: f64, eps: f64, gap: Gap) -> Result<Vec<f64>> {
    let (k, n) = sign_params(kappa, eps)?;
    let cheb = erf_chebyshev_unchecked(2.0 * k, n);
    let tab = LnFactorials::new(n + 1);
    let ln_w = ln_power_weights(&tab, &cheb);
    Ok(ln_compose(&tab, &ln_w, 0.5, a / 2.0, gap))
}

pub(crate) fn rect_ln_coeffs(t: f64, delta: f64, eps: f64) -> Result<Vec<f64>> {
    if !(t > 0.0) || !(delta > 0.0) || !(t + delta / 2.0 < 1.0) {
        return domain(format!("rect needs t > 0, delta > 0 and t + delta/2 < 1 (got t={t}, delta={delta})"));
    }
    shifted_erf_ln_coeffs(t + delta / 4.0, delta / 2.0, eps, Gap::Odd)
}

pub fn rect_cell(t: f64, delta: f64, eps: f64) -> Result<AccessibilityCell> {
    Ok(cell_from_ln(delta, eps_axis(eps), &rect_ln_coeffs(t, delta, eps)?))
}

pub fn sign_cell(a: f64, kappa: f64, eps: f64) -> Result<AccessibilityCell> {
    if !(-1.0..=1.0).contains(&a) {
        return domain(format!("sign shift a must lie in [-1, 1], got {a}"));
    }
    Ok(cell_from_ln(kappa, eps_axis(eps), &shifted_erf_ln_coeffs(a, kappa, eps, Gap::All)?))
}

pub fn erf_cell(k: f64, eps: f64) -> Result<AccessibilityCell> {
    let n = erf_degree(k, eps);
    let cheb = erf_chebyshev_unchecked(k, n);
    let tab = LnFactorials::new(n + 1);
    Ok(cell_from_ln(k, eps_axis(eps), &ln_power_weights(&tab, &cheb)))
}

fn inverse_ln_coeffs(kappa: f64, eps: f64) -> Result<Vec<f64>> {
    let cheb = inverse_chebyshev(kappa, eps)?;
    let tab = LnFactorials::new(cheb.len());
    Ok(ln_power_weights(&tab, &cheb))
}

pub fn inverse_cell(kappa: f64, eps: f64) -> Result<AccessibilityCell> {
    Ok(cell_from_ln(kappa, eps_axis(eps), &inverse_ln_coeffs(kappa, eps)?))
}

/// Bound for `(1/2κ) P_{1/x} (1 - P_rect)`: the magnitudes of a product are bounded by the
/// convolution of the factors' magnitudes.
pub fn matrix_inversion_cell(kappa: f64, eps: f64) -> Result<AccessibilityCell> {
    inverse_params(kappa, eps)?;
    let inv = inverse_ln_coeffs(kappa, eps)?;
    let (t, delta) = mi_rect_params(kappa);
    let mut rect = rect_ln_coeffs(t, delta, eps_rect(kappa, eps)?)?;
    rect[0] = crate::special::log_add(0.0, rect[0]);
    let ln_s = (0.5 / kappa).ln();
    let len = inv.len() + rect.len() - 1;
    let out: Vec<f64> = (0..len)
        .into_par_iter()
        .map(|m| {
            let lo = m.saturating_sub(rect.len() - 1);
            let hi = m.min(inv.len() - 1);
            let terms: Vec<f64> = (lo..=hi).map(|i| inv[i] + rect[m - i]).collect();
            ln_s + log_sum_exp(&terms)
        })
        .collect();
    Ok(cell_from_ln(kappa, eps_axis(eps), &out))
}

/// One cell per `(param, log10(1/ε))`, params outermost. Rect cells use `t = RECT_T`.
pub fn accessibility_map(
    family: AccessibilityFamily,
    params: &[f64],
    log10_inv_eps: &[u32],
) -> Result<Vec<AccessibilityCell>> {
    if params.is_empty() || log10_inv_eps.is_empty() {
        return domain("accessibility grids must be nonempty");
    }
    let jobs: Vec<(f64, u32)> = params
        .iter()
        .flat_map(|&p| log10_inv_eps.iter().map(move |&l| (p, l)))
        .collect();
    jobs.into_par_iter()
        .map(|(p, l)| {
            let eps = 10f64.powi(-(l as i32));
            let mut cell = match family {
                AccessibilityFamily::Threshold => threshold_cell(p, eps)?,
                AccessibilityFamily::Rect => rect_cell(RECT_T, p, eps)?,
            };
            cell.log10_inv_eps = l;
            Ok(cell)
        })
        .collect()
}

/// Header of the accessibility CSV.
pub const ACCESSIBILITY_CSV_HEADER: &str =
    "family,param,log10_inv_eps,max_log10_coeff,min_log10_nonzero,overflow,dynamic_range_digits";

/// CSV text for a list of cells, header first, one line per cell.
pub fn accessibility_csv(family: AccessibilityFamily, cells: &[AccessibilityCell]) -> String {
    let mut out = String::from(ACCESSIBILITY_CSV_HEADER);
    out.push('\n');
    for c in cells {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            family.name(),
            c.param,
            c.log10_inv_eps,
            c.max_log10_coeff,
            c.min_log10_nonzero_coeff,
            c.overflow,
            c.dynamic_range_digits
        ));
    }
    out
}
