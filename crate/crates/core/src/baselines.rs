//! Comparison procedures: the subject-averaged Fréchet test (aF), balanced
//! resampling of repeated measures, and aggregation of resampled p-values.

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, Group, Subject};
use crate::diagnostics::Diagnostic;
use crate::error::{Error, Result};
use crate::inference::{run_test, TestConfig, TestMode, TestResult};
use crate::metric::frechet_mean;
use crate::sum::exact_sum;

/// Largest p-value admitted by the Fisher-z transform.
pub const P_CLIP: f64 = 1.0 - 1e-12;

/// Replaces every subject by the Fréchet mean of its own repeats.
pub fn subject_collapse(dataset: &Dataset) -> Result<Dataset> {
    let groups = dataset
        .groups()
        .iter()
        .map(|g| {
            let subjects = g
                .subjects()
                .iter()
                .map(|s| {
                    let obs = if s.repeats() == 1 {
                        s.observations()[0].clone()
                    } else {
                        frechet_mean(s.observations(), None)?
                    };
                    Subject::new(s.id(), vec![obs])
                })
                .collect::<Result<Vec<_>>>()?;
            Group::new(g.name(), subjects)
        })
        .collect::<Result<Vec<_>>>()?;
    Dataset::new(groups)
}

/// Fréchet test on subject-level averages (mean and variance terms only).
pub fn af_test(dataset: &Dataset, config: &TestConfig) -> Result<TestResult> {
    let collapsed = subject_collapse(dataset)?;
    let cfg = TestConfig {
        mode: TestMode::Reduced,
        ..config.clone()
    };
    run_test(&collapsed, &cfg)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResamplePlan {
    /// Common number of repeats after resampling.
    pub target_r: usize,
    /// Number of resampled datasets.
    pub replicates: usize,
    pub seed: u64,
}

impl ResamplePlan {
    pub fn validate(&self) -> Result<()> {
        if self.target_r == 0 {
            return Err(Error::Domain(
                "target number of repeats must be at least 1".into(),
            ));
        }
        if self.replicates == 0 {
            return Err(Error::Domain("need at least one resample".into()));
        }
        Ok(())
    }
}

/// One balanced dataset: subjects with fewer than `target_r` repeats are
/// dropped, the others keep a uniformly chosen subset of `target_r` repeats
/// (original order preserved).
pub fn balanced_resample_one(
    dataset: &Dataset,
    target_r: usize,
    seed: u64,
    replicate: u64,
) -> Result<Dataset> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replicate);
    let groups = dataset
        .groups()
        .iter()
        .map(|g| {
            let mut subjects = Vec::new();
            for s in g.subjects().iter().filter(|s| s.repeats() >= target_r) {
                let mut idx = sample(&mut rng, s.repeats(), target_r).into_vec();
                idx.sort_unstable();
                let obs = idx.iter().map(|&i| s.observations()[i].clone()).collect();
                subjects.push(Subject::new(s.id(), obs)?);
            }
            if subjects.is_empty() {
                return Err(Error::Domain(format!(
                    "group '{}' has no subject with at least {target_r} repeated measures",
                    g.name()
                )));
            }
            Group::new(g.name(), subjects)
        })
        .collect::<Result<Vec<_>>>()?;
    Dataset::new(groups)
}

/// `plan.replicates` balanced datasets; replicate `b` uses stream `b` of the
/// generator seeded by `plan.seed`.
pub fn balanced_resample(dataset: &Dataset, plan: &ResamplePlan) -> Result<Vec<Dataset>> {
    plan.validate()?;
    (0..plan.replicates as u64)
        .map(|b| balanced_resample_one(dataset, plan.target_r, plan.seed, b))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregatedResult {
    pub p_values: Vec<f64>,
    /// Average Fisher-z transform `1/2 log((1 + p) / (1 - p))`.
    pub theta: f64,
    /// `1 - 2 / (1 + exp(2 theta))`.
    pub overall_p: f64,
    pub diagnostics: Vec<Diagnostic>,
}

/// Combines p-values from resampled analyses into one overall p-value.
pub fn aggregate_p_values(p_values: &[f64]) -> Result<AggregatedResult> {
    if p_values.is_empty() {
        return Err(Error::Domain("no p-values to aggregate".into()));
    }
    let mut diagnostics = Vec::new();
    let mut z = Vec::with_capacity(p_values.len());
    for (i, &p) in p_values.iter().enumerate() {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Domain(format!(
                "p-value {p} at index {i} is outside [0, 1]"
            )));
        }
        let p = if p > P_CLIP {
            diagnostics.push(Diagnostic::PValueClipped { index: i });
            P_CLIP
        } else {
            p
        };
        z.push(0.5 * ((1.0 + p) / (1.0 - p)).ln());
    }
    let theta = exact_sum(z) / p_values.len() as f64;
    // 1 - 2 / (1 + e^{2 theta}) == tanh(theta), evaluated without cancellation.
    let overall_p = theta.tanh().clamp(0.0, 1.0);
    Ok(AggregatedResult {
        p_values: p_values.to_vec(),
        theta,
        overall_p,
        diagnostics,
    })
}

/// Balanced resampling followed by the aF test on every replicate and
/// aggregation of the replicate p-values.
pub fn resampled_af(
    dataset: &Dataset,
    plan: &ResamplePlan,
    config: &TestConfig,
) -> Result<AggregatedResult> {
    plan.validate()?;
    let mut p = Vec::with_capacity(plan.replicates);
    for b in 0..plan.replicates as u64 {
        let ds = balanced_resample_one(dataset, plan.target_r, plan.seed, b)?;
        let r = af_test(&ds, config).map_err(|e| e.context(format!("resample {b}")))?;
        p.push(r.p_value);
    }
    aggregate_p_values(&p)
}
