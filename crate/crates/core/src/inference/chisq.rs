//! Survival function of `sum_j phi_j Z_j^2` for independent standard
//! normals `Z_j` and positive weights `phi_j`.
//!
//! The primary route inverts the characteristic function with Imhof's
//! integral
//!
//! ```text
//! P(Q > q) = 1/2 + (1/pi) * int_0^inf sin(theta(u)) / (u rho(u)) du
//! theta(u) = 1/2 sum_j atan(phi_j u) - q u / 2
//! rho(u)   = prod_j (1 + phi_j^2 u^2)^(1/4)
//! ```
//!
//! The integrand oscillates with half-period `2 pi / q` and decays only like
//! `u^(-1 - m/2)`, so the range is cut into half-period panels, each panel is
//! integrated with adaptive Gauss-Kronrod, and the alternating sequence of
//! partial sums is extrapolated with Wynn's epsilon algorithm. A seeded Monte
//! Carlo estimate is the fallback when this does not converge.

use std::f64::consts::PI;
use std::sync::OnceLock;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

pub const DEFAULT_MC_DRAWS: usize = 1_000_000;
pub const DEFAULT_MC_SEED: u64 = 20_240_601;

/// Absolute accuracy target for the quadrature route.
pub const QUADRATURE_TOL: f64 = 1e-8;

const MAX_PANELS: usize = 600;
const EPSILON_WINDOW: usize = 32;

// Gauss-Kronrod 7/15 nodes and weights.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_5,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_48,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_19,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_42,
    0.204_432_940_075_298_89,
    0.209_482_141_084_727_82,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_64,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut resk = fc * WGK[7];
    let mut resg = fc * WG[3];
    for j in 0..3 {
        let x = h * XGK[2 * j + 1];
        let s = f(c - x) + f(c + x);
        resg += WG[j] * s;
        resk += WGK[2 * j + 1] * s;
    }
    for j in 0..4 {
        let x = h * XGK[2 * j];
        resk += WGK[2 * j] * (f(c - x) + f(c + x));
    }
    (resk * h, ((resk - resg) * h).abs())
}

/// Adaptive Gauss-Kronrod on `[a, b]` to absolute tolerance `tol`.
pub(crate) fn integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> Result<f64> {
    const MAX_INTERVALS: usize = 4000;
    let width = b - a;
    let mut stack = vec![(a, b)];
    let mut total = 0.0;
    let mut evaluated = 0;
    while let Some((lo, hi)) = stack.pop() {
        evaluated += 1;
        if evaluated > MAX_INTERVALS {
            return Err(Error::Numeric(format!(
                "adaptive quadrature on [{a}, {b}] exceeded {MAX_INTERVALS} subintervals"
            )));
        }
        let (val, err) = gk15(f, lo, hi);
        if !val.is_finite() {
            return Err(Error::Numeric("non-finite integrand".into()));
        }
        let local_tol = tol * (hi - lo) / width;
        if err <= local_tol || (hi - lo) <= 1e-12 * width {
            total += val;
        } else {
            let mid = 0.5 * (lo + hi);
            stack.push((mid, hi));
            stack.push((lo, mid));
        }
    }
    Ok(total)
}

/// Wynn's epsilon extrapolation of a sequence of partial sums; returns the
/// estimate from the deepest even column.
pub(crate) fn wynn_epsilon(s: &[f64]) -> f64 {
    let n = s.len();
    if n < 3 {
        return s[n - 1];
    }
    let mut prev = vec![0.0; n + 1];
    let mut cur = s.to_vec();
    let mut best = s[n - 1];
    for k in 1..n {
        let len = n - k;
        let mut next = Vec::with_capacity(len);
        for j in 0..len {
            let d = cur[j + 1] - cur[j];
            if d == 0.0 || !d.is_finite() {
                // Column has converged exactly.
                return if (k - 1) % 2 == 0 { cur[j + 1] } else { best };
            }
            next.push(prev[j + 1] + 1.0 / d);
        }
        if k % 2 == 0 {
            let last = next[len - 1];
            if !last.is_finite() {
                return best;
            }
            best = last;
        }
        prev = cur;
        cur = next;
    }
    best
}

fn validate_weights(phis: &[f64]) -> Result<()> {
    if phis.is_empty() {
        return Err(Error::Domain(
            "weighted chi-squared law needs at least one weight".into(),
        ));
    }
    if let Some(p) = phis.iter().find(|p| !(p.is_finite() && **p > 0.0)) {
        return Err(Error::Domain(format!("weight {p} is not positive")));
    }
    Ok(())
}

/// Imhof inversion; errors if the panel sequence fails to converge.
pub fn imhof_sf(q: f64, phis: &[f64]) -> Result<f64> {
    validate_weights(phis)?;
    if !q.is_finite() {
        return Err(Error::Domain(format!("quantile {q} is not finite")));
    }
    if q <= 0.0 {
        return Ok(1.0);
    }
    let scale = phis.iter().cloned().fold(0.0, f64::max);
    let w: Vec<f64> = phis.iter().map(|p| p / scale).collect();
    let q = q / scale;

    let f = |u: f64| {
        let mut theta = -0.5 * q * u;
        let mut log_rho = 0.0;
        for &p in &w {
            let pu = p * u;
            theta += 0.5 * pu.atan();
            log_rho += 0.25 * (pu * pu).ln_1p();
        }
        theta.sin() / (u * log_rho.exp())
    };

    let half_period = 2.0 * PI / q;
    let panel_tol = 1e-13;
    let tol = 1e-10;

    // First panel: geometric split so the smooth head near zero and the slow
    // decay are both resolved.
    let mut first = 0.0;
    let mut lo = 0.0;
    let mut hi = half_period.min(1.0);
    loop {
        first += integrate(&f, lo, hi, panel_tol)?;
        if hi >= half_period {
            break;
        }
        lo = hi;
        hi = (hi * 2.0).min(half_period);
    }

    let mut partial = vec![first];
    let mut estimates: Vec<f64> = Vec::new();
    let mut running = first;
    for k in 1..MAX_PANELS {
        let a = k as f64 * half_period;
        let panel = integrate(&f, a, a + half_period, panel_tol)?;
        running += panel;
        partial.push(running);
        let window = &partial[partial.len().saturating_sub(EPSILON_WINDOW)..];
        let est = wynn_epsilon(window);
        estimates.push(est);
        let m = estimates.len();
        if m >= 4 {
            let d1 = (estimates[m - 1] - estimates[m - 2]).abs();
            let d2 = (estimates[m - 2] - estimates[m - 3]).abs();
            if d1 <= tol && d2 <= tol {
                let sf = 0.5 + est / PI;
                return Ok(sf.clamp(0.0, 1.0));
            }
        }
    }
    Err(Error::Numeric(format!(
        "Imhof integral did not converge within {MAX_PANELS} panels (q = {q})"
    )))
}

/// Monte Carlo estimate of `P(Q > q)` from `draws` seeded samples.
pub fn monte_carlo_sf(q: f64, phis: &[f64], draws: usize, seed: u64) -> Result<f64> {
    validate_weights(phis)?;
    if draws == 0 {
        return Err(Error::Domain("Monte Carlo needs at least one draw".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut exceed = 0usize;
    for _ in 0..draws {
        if draw(&mut rng, phis) > q {
            exceed += 1;
        }
    }
    Ok(exceed as f64 / draws as f64)
}

fn draw(rng: &mut ChaCha8Rng, phis: &[f64]) -> f64 {
    phis.iter()
        .map(|p| {
            let z: f64 = StandardNormal.sample(rng);
            p * z * z
        })
        .sum()
}

/// `P(sum phi_j Z_j^2 > q)`: Imhof quadrature, falling back to Monte Carlo
/// with the default seed and draw count.
pub fn weighted_chisq_sf(q: f64, phis: &[f64]) -> Result<f64> {
    match imhof_sf(q, phis) {
        Ok(p) => Ok(p),
        Err(Error::Numeric(_)) => monte_carlo_sf(q, phis, DEFAULT_MC_DRAWS, DEFAULT_MC_SEED),
        Err(e) => Err(e),
    }
}

/// How a survival probability is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SfRoute {
    Quadrature,
    MonteCarlo,
}

/// The weighted chi-squared null law with a cached Monte Carlo sample used
/// by the Monte Carlo route and the quadrature fallback.
#[derive(Debug)]
pub struct WeightedChiSquare {
    weights: Vec<f64>,
    draws: usize,
    seed: u64,
    sample: OnceLock<Vec<f64>>,
}

/// Outcome of a survival-function evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct SfValue {
    pub value: f64,
    pub route: SfRoute,
    /// Why quadrature was abandoned, when it was.
    pub fallback: Option<String>,
}

impl WeightedChiSquare {
    pub fn new(weights: Vec<f64>, draws: usize, seed: u64) -> Result<Self> {
        validate_weights(&weights)?;
        if draws == 0 {
            return Err(Error::Domain("Monte Carlo needs at least one draw".into()));
        }
        Ok(Self {
            weights,
            draws,
            seed,
            sample: OnceLock::new(),
        })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    fn sorted_sample(&self) -> &[f64] {
        self.sample.get_or_init(|| {
            let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
            let mut s: Vec<f64> = (0..self.draws)
                .map(|_| draw(&mut rng, &self.weights))
                .collect();
            s.sort_by(f64::total_cmp);
            s
        })
    }

    fn mc_sf(&self, q: f64) -> f64 {
        let s = self.sorted_sample();
        let at_or_below = s.partition_point(|&x| x <= q);
        (s.len() - at_or_below) as f64 / s.len() as f64
    }

    pub fn sf(&self, q: f64, route: SfRoute) -> Result<SfValue> {
        match route {
            SfRoute::MonteCarlo => Ok(SfValue {
                value: self.mc_sf(q),
                route,
                fallback: None,
            }),
            SfRoute::Quadrature => match imhof_sf(q, &self.weights) {
                Ok(value) => Ok(SfValue {
                    value,
                    route,
                    fallback: None,
                }),
                Err(Error::Numeric(reason)) => Ok(SfValue {
                    value: self.mc_sf(q),
                    route: SfRoute::MonteCarlo,
                    fallback: Some(reason),
                }),
                Err(e) => Err(e),
            },
        }
    }

    /// Upper `alpha` quantile `q_alpha`: the smallest `q` (to 1e-10) with
    /// `sf(q) < alpha`, found by bisection on the survival function.
    pub fn upper_quantile(&self, alpha: f64, route: SfRoute) -> Result<f64> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::Domain(format!("alpha {alpha} outside (0, 1)")));
        }
        let sf = |q: f64| self.sf(q, route).map(|v| v.value);
        let mut lo = 0.0;
        let mut hi = self.weights.iter().sum::<f64>().max(1e-300);
        let mut guard = 0;
        while sf(hi)? >= alpha {
            lo = hi;
            hi *= 2.0;
            guard += 1;
            if guard > 200 {
                return Err(Error::Numeric(
                    "could not bracket the critical value".into(),
                ));
            }
        }
        while hi - lo > 1e-10 * hi.max(1.0) {
            let mid = 0.5 * (lo + hi);
            if sf(mid)? < alpha {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(hi)
    }
}
