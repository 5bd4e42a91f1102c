//! Per-group and pooled sample quantities: Fréchet mean and variance,
//! within-subject variability, and the variance estimators that standardize
//! them.
//!
//! All estimators are functions of two per-subject sums,
//! `a_i = sum_l d^2(mu_j, Y_il)` and `b_i = sum_{s != t} d^2(Y_is, Y_it)`
//! (ordered pairs), so each distance is evaluated once. Sums are correctly
//! rounded, which makes every estimate exactly invariant under reordering
//! of subjects and of repeats within a subject.

use crate::dataset::{Dataset, Group};
use crate::diagnostics::Diagnostic;
use crate::error::{Error, Result};
use crate::metric::{frechet_mean, MetricObject};
use crate::sum::{exact_sum, ExactSum};

/// Per-subject ingredients of every estimator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubjectSums {
    pub repeats: usize,
    /// `sum_l d^2(mean, Y_il)`.
    pub to_mean: f64,
    /// `sum_{s != t} d^2(Y_is, Y_it)` over ordered pairs.
    pub within: f64,
}

/// Sufficient statistics of one group.
#[derive(Debug, Clone)]
pub struct GroupSums {
    pub subjects: Vec<SubjectSums>,
    pub n_obs: usize,
    /// `sum_i r_i^2`.
    pub sum_r2: usize,
}

impl GroupSums {
    pub fn compute(group: &Group, mean: &MetricObject) -> Result<Self> {
        let mut subjects = Vec::with_capacity(group.subjects().len());
        for s in group.subjects() {
            let obs = s.observations();
            let mut to_mean = ExactSum::new();
            for o in obs {
                to_mean.add(mean.distance_squared(o)?);
            }
            let mut pairs = ExactSum::new();
            for a in 0..obs.len() {
                for b in (a + 1)..obs.len() {
                    pairs.add(obs[a].distance_squared(&obs[b])?);
                }
            }
            subjects.push(SubjectSums {
                repeats: obs.len(),
                to_mean: to_mean.value(),
                within: 2.0 * pairs.value(),
            });
        }
        let n_obs = subjects.iter().map(|s| s.repeats).sum();
        let sum_r2 = subjects.iter().map(|s| s.repeats * s.repeats).sum();
        Ok(Self {
            subjects,
            n_obs,
            sum_r2,
        })
    }

    /// `sum_i r_i (r_i - 1)`, the number of ordered within-subject pairs.
    pub fn pair_count(&self) -> usize {
        self.sum_r2 - self.n_obs
    }

    pub fn v_hat(&self) -> f64 {
        exact_sum(self.subjects.iter().map(|s| s.to_mean)) / self.n_obs as f64
    }

    pub fn rho_hat(&self) -> Option<f64> {
        let pairs = self.pair_count();
        (pairs > 0).then(|| exact_sum(self.subjects.iter().map(|s| s.within)) / pairs as f64)
    }

    fn totals(&self, f: impl Fn(&SubjectSums) -> f64) -> ExactSum {
        let mut acc = ExactSum::new();
        for s in &self.subjects {
            acc.add(f(s));
        }
        acc
    }

    fn squares(&self, f: impl Fn(&SubjectSums) -> (f64, f64)) -> ExactSum {
        let mut acc = ExactSum::new();
        for s in &self.subjects {
            let (x, y) = f(s);
            acc.add_product(x, y);
        }
        acc
    }

    fn repeat_weight(&self, f: impl Fn(usize) -> usize) -> f64 {
        self.subjects.iter().map(|s| f(s.repeats)).sum::<usize>() as f64
    }

    /// Unclamped `sigma_j^2` estimate, `(N^2 sum a^2 - R A^2) / N^3` with the
    /// numerator accumulated exactly.
    pub fn sigma2_raw(&self) -> f64 {
        let n = self.n_obs as f64;
        let a = self.totals(|s| s.to_mean);
        let mut num = ExactSum::new();
        num.add_scaled(&self.squares(|s| (s.to_mean, s.to_mean)), n * n);
        num.add_product_of(&a, &a, -(self.sum_r2 as f64));
        num.value() / (n * n * n)
    }

    /// Unclamped `gamma_j^2` estimate, `N (P^2 sum b^2 - W B^2) / P^4`;
    /// `None` without within-subject pairs.
    pub fn gamma2_raw(&self) -> Option<f64> {
        let pairs = self.pair_count();
        if pairs == 0 {
            return None;
        }
        let p2 = (pairs as f64) * (pairs as f64);
        let w = self.repeat_weight(|r| r * r * (r - 1) * (r - 1));
        let b = self.totals(|s| s.within);
        let mut num = ExactSum::new();
        num.add_scaled(&self.squares(|s| (s.within, s.within)), p2);
        num.add_product_of(&b, &b, -w);
        Some(self.n_obs as f64 * num.value() / (p2 * p2))
    }

    /// Cross-covariance estimate `Sigma_jj` between the Fréchet variance and
    /// the within-subject variability, `(N P sum ab - C A B) / (N P^2)`.
    pub fn cross_cov(&self) -> Option<f64> {
        let pairs = self.pair_count();
        if pairs == 0 {
            return None;
        }
        let (n, p) = (self.n_obs as f64, pairs as f64);
        let c = self.repeat_weight(|r| r * r * (r - 1));
        let a = self.totals(|s| s.to_mean);
        let b = self.totals(|s| s.within);
        let mut num = ExactSum::new();
        num.add_scaled(&self.squares(|s| (s.to_mean, s.within)), n * p);
        num.add_product_of(&a, &b, -c);
        Some(num.value() / (n * p * p))
    }
}

/// Estimates for one group.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupSummary {
    pub name: String,
    pub frechet_mean: MetricObject,
    pub n_subjects: usize,
    /// `N_j`.
    pub n_obs: usize,
    /// `N_j / N`.
    pub lambda_hat: f64,
    pub v_hat: f64,
    pub rho_hat: Option<f64>,
    /// Clamped at zero.
    pub sigma2_hat: f64,
    /// Clamped at zero; `None` when no subject has two repeats.
    pub gamma2_hat: Option<f64>,
    pub cross_cov_hat: Option<f64>,
    /// Clamped to `[-1, 1]`; `None` when either variance vanishes.
    pub xi_hat: Option<f64>,
    pub diagnostics: Vec<Diagnostic>,
}

/// Group Fréchet mean over all `N_j` observations and the sample Fréchet
/// variance around it.
pub fn group_frechet_variance(group: &Group) -> Result<(MetricObject, f64)> {
    let obs: Vec<MetricObject> = group.observations().cloned().collect();
    let mean = frechet_mean(&obs, None)?;
    let v = exact_sum(
        obs.iter()
            .map(|o| mean.distance_squared(o))
            .collect::<Result<Vec<_>>>()?,
    ) / obs.len() as f64;
    Ok((mean, v))
}

/// Sample within-subject variability; `None` when every subject has a
/// single observation.
pub fn within_subject_variability(group: &Group) -> Result<Option<f64>> {
    let mut total = ExactSum::new();
    let mut pairs = 0usize;
    for s in group.subjects() {
        let obs = s.observations();
        let r = obs.len();
        pairs += r * (r - 1);
        let mut sub = ExactSum::new();
        for a in 0..r {
            for b in (a + 1)..r {
                sub.add(obs[a].distance_squared(&obs[b])?);
            }
        }
        total.add(2.0 * sub.value());
    }
    Ok((pairs > 0).then(|| total.value() / pairs as f64))
}

/// Variance estimate for `N_j^{1/2} V_j`, before clamping.
pub fn sigma2_hat(group: &Group, mean: &MetricObject) -> Result<f64> {
    Ok(GroupSums::compute(group, mean)?.sigma2_raw())
}

/// Variance estimate for `N_j^{1/2} rho_j`, before clamping.
pub fn gamma2_hat(group: &Group, mean: &MetricObject) -> Result<Option<f64>> {
    Ok(GroupSums::compute(group, mean)?.gamma2_raw())
}

/// Correlation estimate `xi_j = Sigma_jj / (sigma_j gamma_j)` clamped to
/// `[-1, 1]`, together with the unclamped ratio.
pub fn xi_hat(group: &Group, mean: &MetricObject) -> Result<Option<(f64, f64)>> {
    let sums = GroupSums::compute(group, mean)?;
    Ok(xi_from_sums(&sums))
}

fn xi_from_sums(sums: &GroupSums) -> Option<(f64, f64)> {
    let s2 = sums.sigma2_raw();
    let g2 = sums.gamma2_raw()?;
    if !(s2 > 0.0 && g2 > 0.0) {
        return None;
    }
    let raw = sums.cross_cov()? / (s2.sqrt() * g2.sqrt());
    Some((raw.clamp(-1.0, 1.0), raw))
}

/// Pooled Fréchet mean and variance ignoring group labels.
pub fn pooled_variance(dataset: &Dataset) -> Result<(MetricObject, f64)> {
    let obs: Vec<MetricObject> = dataset.observations().cloned().collect();
    let mean = frechet_mean(&obs, None)?;
    let v = exact_sum(
        obs.iter()
            .map(|o| mean.distance_squared(o))
            .collect::<Result<Vec<_>>>()?,
    ) / obs.len() as f64;
    Ok((mean, v))
}

/// `D_n = V_p - sum_j lambda_j V_j` without subtracting two rounded
/// variances. Inner-product spaces use `sum_j lambda_j d^2(mu_j, mu_p)`;
/// otherwise one correctly rounded sum of `d^2(mu_p, Y) - d^2(mu_j, Y)` over
/// all observations. `summaries` are in dataset group order.
pub fn mean_shift(
    dataset: &Dataset,
    pooled_mean: &MetricObject,
    summaries: &[GroupSummary],
) -> Result<f64> {
    if summaries.len() != dataset.groups().len() {
        return Err(Error::Shape("one summary per group is required".into()));
    }
    let mut acc = ExactSum::new();
    if pooled_mean.is_hilbert() {
        for s in summaries {
            acc.add(s.lambda_hat * s.frechet_mean.distance_squared(pooled_mean)?);
        }
        return Ok(acc.value());
    }
    for (g, s) in dataset.groups().iter().zip(summaries) {
        for y in g.observations() {
            acc.add(pooled_mean.distance_squared(y)?);
            acc.add(-s.frechet_mean.distance_squared(y)?);
        }
    }
    Ok(acc.value() / dataset.n_obs() as f64)
}

/// All estimates for one group; `n_total` is `N` over the whole dataset.
pub fn summarize_group(group: &Group, n_total: usize) -> Result<GroupSummary> {
    let obs: Vec<MetricObject> = group.observations().cloned().collect();
    let mean =
        frechet_mean(&obs, None).map_err(|e| e.context(format!("group '{}'", group.name())))?;
    let sums = GroupSums::compute(group, &mean)
        .map_err(|e| e.context(format!("group '{}'", group.name())))?;
    let mut diagnostics = Vec::new();

    let s2_raw = sums.sigma2_raw();
    let sigma2_hat = if s2_raw < 0.0 {
        diagnostics.push(Diagnostic::Sigma2Clamped {
            group: group.name().to_string(),
            raw: s2_raw,
        });
        0.0
    } else {
        s2_raw
    };
    let gamma2_hat = sums.gamma2_raw().map(|g| {
        if g < 0.0 {
            diagnostics.push(Diagnostic::Gamma2Clamped {
                group: group.name().to_string(),
                raw: g,
            });
            0.0
        } else {
            g
        }
    });
    let xi_hat = xi_from_sums(&sums).map(|(xi, raw)| {
        if xi != raw {
            diagnostics.push(Diagnostic::XiClamped {
                group: group.name().to_string(),
                raw,
            });
        }
        xi
    });

    Ok(GroupSummary {
        name: group.name().to_string(),
        n_subjects: group.subjects().len(),
        n_obs: sums.n_obs,
        lambda_hat: sums.n_obs as f64 / n_total as f64,
        v_hat: sums.v_hat(),
        rho_hat: sums.rho_hat(),
        sigma2_hat,
        gamma2_hat,
        cross_cov_hat: sums.cross_cov(),
        xi_hat,
        frechet_mean: mean,
        diagnostics,
    })
}

/// Summaries of every group in dataset order.
pub fn summarize(dataset: &Dataset) -> Result<Vec<GroupSummary>> {
    let n = dataset.n_obs();
    dataset
        .groups()
        .iter()
        .map(|g| summarize_group(g, n))
        .collect()
}

pub(crate) fn require_group(summary: &GroupSummary) -> Result<(f64, f64, f64)> {
    let rho = summary.rho_hat.ok_or_else(|| Error::NoRepeatedMeasures {
        group: summary.name.clone(),
    })?;
    let g2 = summary.gamma2_hat.unwrap_or(0.0);
    if summary.sigma2_hat.is_nan() || summary.sigma2_hat <= 0.0 {
        return Err(Error::calibration(
            &summary.name,
            "estimated variance of the Fréchet variance is zero",
        ));
    }
    if g2.is_nan() || g2 <= 0.0 {
        return Err(Error::calibration(
            &summary.name,
            "estimated variance of the within-subject variability is zero",
        ));
    }
    Ok((rho, summary.sigma2_hat, g2))
}
