//! Test statistic assembly, null calibration and the test decision.

pub mod calibration;
pub mod chisq;

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::diagnostics::Diagnostic;
use crate::error::{Error, Result};
use crate::estimators::{mean_shift, pooled_variance, require_group, summarize, GroupSummary};
use crate::sum::exact_sum;

pub use calibration::{limiting_matrix, positive_eigenvalues, projection, CalibrationInput};
pub use chisq::{
    imhof_sf, monte_carlo_sf, weighted_chisq_sf, SfRoute, WeightedChiSquare, DEFAULT_MC_DRAWS,
    DEFAULT_MC_SEED,
};

/// Which statistic is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestMode {
    /// Mean, variance and within-subject terms; `2k - 2` weights.
    Full,
    /// Mean and variance terms only, calibrated by the `A` block (`k - 1`
    /// weights). Used when subjects have single observations.
    Reduced,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PValueMethod {
    Quadrature,
    MonteCarlo,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestConfig {
    pub alpha: f64,
    pub mode: TestMode,
    pub pvalue_method: PValueMethod,
    pub mc_draws: usize,
    pub mc_seed: u64,
}

impl Default for TestConfig {
    fn default() -> Self {
        Self {
            alpha: 0.05,
            mode: TestMode::Full,
            pvalue_method: PValueMethod::Quadrature,
            mc_draws: DEFAULT_MC_DRAWS,
            mc_seed: DEFAULT_MC_SEED,
        }
    }
}

impl TestConfig {
    pub fn reduced() -> Self {
        Self {
            mode: TestMode::Reduced,
            ..Self::default()
        }
    }
}

/// The auxiliary statistics and their standardized contributions to `Q_n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestComponents {
    pub d_n: f64,
    pub u_n: f64,
    /// Absent in reduced mode.
    pub r_n: Option<f64>,
    /// `N D_n^2 / sum_j lambda_j^2 sigma_j^2`.
    pub mean_term: f64,
    /// `N U_n / sum_j lambda_j / sigma_j^2`.
    pub variance_term: f64,
    /// `N R_n / sum_j lambda_j / gamma_j^2`.
    pub within_term: Option<f64>,
    pub q_n: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NullCalibration {
    /// Row-major limiting matrix (`2k x 2k`, or `k x k` in reduced mode).
    pub matrix: Vec<Vec<f64>>,
    /// Weights `phi_j` in descending order.
    pub eigenvalues: Vec<f64>,
    pub method: PValueMethod,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TestResult {
    pub mode: TestMode,
    pub components: TestComponents,
    pub calibration: NullCalibration,
    pub p_value: f64,
    /// Upper `alpha` quantile of the null law.
    pub critical_value: f64,
    pub alpha: f64,
    pub reject: bool,
    pub n_obs: usize,
    pub pooled_v_hat: f64,
    pub group_summaries: Vec<GroupSummary>,
    pub diagnostics: Vec<Diagnostic>,
}

/// Per-group values that enter the statistic.
#[derive(Debug, Clone, Copy)]
struct GroupTerms {
    lambda: f64,
    v: f64,
    sigma2: f64,
    rho: f64,
    gamma2: f64,
    xi: f64,
}

impl GroupTerms {
    fn key(&self) -> [f64; 6] {
        [
            self.lambda,
            self.v,
            self.sigma2,
            self.rho,
            self.gamma2,
            self.xi,
        ]
    }
}

fn canonical_cmp(a: &GroupTerms, b: &GroupTerms) -> Ordering {
    a.key()
        .iter()
        .zip(b.key().iter())
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| *o != Ordering::Equal)
        .unwrap_or(Ordering::Equal)
}

fn group_terms(summaries: &[GroupSummary], mode: TestMode) -> Result<Vec<GroupTerms>> {
    if summaries.len() < 2 {
        return Err(Error::Domain(format!(
            "the test compares at least two groups, got {}",
            summaries.len()
        )));
    }
    let mut terms = Vec::with_capacity(summaries.len());
    for s in summaries {
        let t = match mode {
            TestMode::Full => {
                let (rho, sigma2, gamma2) = require_group(s)?;
                GroupTerms {
                    lambda: s.lambda_hat,
                    v: s.v_hat,
                    sigma2,
                    rho,
                    gamma2,
                    xi: s.xi_hat.unwrap_or(0.0),
                }
            }
            TestMode::Reduced => {
                if s.sigma2_hat.is_nan() || s.sigma2_hat <= 0.0 {
                    return Err(Error::calibration(
                        &s.name,
                        "estimated variance of the Fréchet variance is zero",
                    ));
                }
                GroupTerms {
                    lambda: s.lambda_hat,
                    v: s.v_hat,
                    sigma2: s.sigma2_hat,
                    rho: 0.0,
                    gamma2: 0.0,
                    xi: 0.0,
                }
            }
        };
        terms.push(t);
    }
    // A canonical group order makes every downstream quantity, including the
    // eigen-decomposition, bit-identical under relabeling of groups.
    terms.sort_by(canonical_cmp);
    Ok(terms)
}

/// `U_n`, `R_n` and `Q_n` from group summaries, `D_n` (see
/// [`mean_shift`]) and the total number of observations `N`.
pub fn compute_components(
    summaries: &[GroupSummary],
    d_n: f64,
    n_obs: usize,
    mode: TestMode,
) -> Result<TestComponents> {
    let terms = group_terms(summaries, mode)?;
    Ok(components_from_terms(&terms, d_n, n_obs, mode))
}

fn components_from_terms(
    terms: &[GroupTerms],
    d_n: f64,
    n_obs: usize,
    mode: TestMode,
) -> TestComponents {
    let n = n_obs as f64;

    let mut u_terms = Vec::new();
    let mut r_terms = Vec::new();
    for j in 0..terms.len() {
        for l in (j + 1)..terms.len() {
            let (a, b) = (&terms[j], &terms[l]);
            let lam = a.lambda * b.lambda;
            let dv = a.v - b.v;
            u_terms.push(lam / (a.sigma2 * b.sigma2) * dv * dv);
            let dr = a.rho - b.rho;
            r_terms.push(lam / (a.gamma2 * b.gamma2) * dr * dr);
        }
    }
    let u_n = exact_sum(u_terms);
    let mean_term = n * d_n * d_n / exact_sum(terms.iter().map(|t| t.lambda * t.lambda * t.sigma2));
    let variance_term = n * u_n / exact_sum(terms.iter().map(|t| t.lambda / t.sigma2));

    match mode {
        TestMode::Full => {
            let r_n = exact_sum(r_terms);
            let within_term = n * r_n / exact_sum(terms.iter().map(|t| t.lambda / t.gamma2));
            TestComponents {
                d_n,
                u_n,
                r_n: Some(r_n),
                mean_term,
                variance_term,
                within_term: Some(within_term),
                q_n: mean_term + variance_term + within_term,
            }
        }
        TestMode::Reduced => TestComponents {
            d_n,
            u_n,
            r_n: None,
            mean_term,
            variance_term,
            within_term: None,
            q_n: mean_term + variance_term,
        },
    }
}

/// Runs the generalized Fréchet test on `dataset`.
pub fn run_test(dataset: &Dataset, config: &TestConfig) -> Result<TestResult> {
    if !(config.alpha > 0.0 && config.alpha < 1.0) {
        return Err(Error::Domain(format!(
            "alpha {} outside (0, 1)",
            config.alpha
        )));
    }
    let summaries = summarize(dataset)?;
    let (pooled_mean, pooled_v_hat) = pooled_variance(dataset)?;
    let d_n = mean_shift(dataset, &pooled_mean, &summaries)?;
    let n_obs = dataset.n_obs();
    let terms = group_terms(&summaries, config.mode)?;
    let components = components_from_terms(&terms, d_n, n_obs, config.mode);

    let mut diagnostics: Vec<Diagnostic> = summaries
        .iter()
        .flat_map(|s| s.diagnostics.iter().cloned())
        .collect();

    let k = terms.len();
    let (matrix, cap) = match config.mode {
        TestMode::Full => {
            let inputs: Vec<CalibrationInput> = terms
                .iter()
                .map(|t| CalibrationInput {
                    lambda: t.lambda,
                    sigma2: t.sigma2,
                    gamma2: t.gamma2,
                    xi: t.xi,
                })
                .collect();
            (limiting_matrix(&inputs)?, 2 * k - 2)
        }
        TestMode::Reduced => {
            let lambdas: Vec<f64> = terms.iter().map(|t| t.lambda).collect();
            let sig: Vec<f64> = terms.iter().map(|t| t.sigma2).collect();
            (projection(&lambdas, &sig)?, k - 1)
        }
    };
    let (eigenvalues, dropped) = positive_eigenvalues(&matrix, cap)?;
    if !dropped.is_empty() {
        diagnostics.push(Diagnostic::EigenvaluesCapped {
            kept: eigenvalues.len(),
            dropped,
        });
    }
    if eigenvalues.is_empty() {
        return Err(Error::Numeric(
            "limiting matrix has no positive eigenvalue".into(),
        ));
    }

    let law = WeightedChiSquare::new(eigenvalues.clone(), config.mc_draws, config.mc_seed)?;
    let route = match config.pvalue_method {
        PValueMethod::Quadrature => SfRoute::Quadrature,
        PValueMethod::MonteCarlo => SfRoute::MonteCarlo,
    };
    let sf = law.sf(components.q_n, route)?;
    if let Some(reason) = &sf.fallback {
        diagnostics.push(Diagnostic::QuadratureFallback {
            reason: reason.clone(),
        });
    }
    let method = match sf.route {
        SfRoute::Quadrature => PValueMethod::Quadrature,
        SfRoute::MonteCarlo => PValueMethod::MonteCarlo,
    };
    diagnostics.push(Diagnostic::PValueMethod {
        method: match method {
            PValueMethod::Quadrature => "quadrature".into(),
            PValueMethod::MonteCarlo => "monte_carlo".into(),
        },
    });
    let p_value = sf.value.clamp(0.0, 1.0);
    let critical_value = law.upper_quantile(config.alpha, route)?;

    Ok(TestResult {
        mode: config.mode,
        components,
        calibration: NullCalibration {
            matrix: matrix
                .row_iter()
                .map(|r| r.iter().copied().collect())
                .collect(),
            eigenvalues,
            method,
        },
        p_value,
        critical_value,
        alpha: config.alpha,
        reject: p_value < config.alpha,
        n_obs,
        pooled_v_hat,
        group_summaries: summaries,
        diagnostics,
    })
}
