use std::f64::consts::SQRT_2;

use statrs::function::erf::{erfc, erfc_inv};

/// Standard normal CDF.
pub fn norm_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / SQRT_2)
}

/// Standard normal upper tail `1 - Phi(x)`.
pub fn norm_sf(x: f64) -> f64 {
    0.5 * erfc(x / SQRT_2)
}

/// Standard normal quantile; accurate in both tails when `p` itself is.
pub fn norm_ppf(p: f64) -> f64 {
    -SQRT_2 * erfc_inv(2.0 * p)
}

/// Quantiles at levels `grid` of N(mean, sd^2) truncated to `[lo, hi]`.
///
/// Works on whichever tail keeps the target probability small, so bounds
/// many standard deviations away from the mean keep full precision. The
/// output is clamped to `[lo, hi]` and made non-decreasing.
pub fn truncated_normal_quantiles(mean: f64, sd: f64, lo: f64, hi: f64, grid: &[f64]) -> Vec<f64> {
    let a = (lo - mean) / sd;
    let b = (hi - mean) / sd;
    let (pa, pb) = (norm_cdf(a), norm_cdf(b));
    let (qa, qb) = (norm_sf(a), norm_sf(b));
    let mut out = Vec::with_capacity(grid.len());
    let mut prev = lo;
    for &t in grid {
        let p = (1.0 - t) * pa + t * pb;
        let z = if p <= 0.5 {
            norm_ppf(p)
        } else {
            -norm_ppf((1.0 - t) * qa + t * qb)
        };
        let x = if z.is_nan() {
            if p <= 0.5 {
                lo
            } else {
                hi
            }
        } else {
            (mean + sd * z).clamp(lo, hi)
        };
        prev = prev.max(x);
        out.push(prev);
    }
    out
}
