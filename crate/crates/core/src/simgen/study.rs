use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{generate, ScenarioConfig};
use crate::baselines::af_test;
use crate::error::Result;
use crate::inference::{run_test, TestConfig};

/// Test applied to every simulated dataset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StudyMethod {
    /// The repeated-measures test on all observations.
    Qn,
    /// Fréchet test on subject-averaged observations.
    Af,
}

impl StudyMethod {
    pub fn name(&self) -> &'static str {
        match self {
            StudyMethod::Qn => "qn",
            StudyMethod::Af => "af",
        }
    }
}

impl std::str::FromStr for StudyMethod {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "qn" => Ok(StudyMethod::Qn),
            "af" => Ok(StudyMethod::Af),
            _ => Err(crate::error::Error::Domain(format!("unknown method '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodSummary {
    pub method: StudyMethod,
    pub rejections: usize,
    pub rate: f64,
    /// Monte Carlo standard error `sqrt(rate (1 - rate) / replicates)`.
    pub se: f64,
    pub p_values: Vec<f64>,
}

impl MethodSummary {
    fn from_p_values(method: StudyMethod, p_values: Vec<f64>, alpha: f64) -> Self {
        let reps = p_values.len();
        let rejections = p_values.iter().filter(|&&p| p < alpha).count();
        let rate = rejections as f64 / reps as f64;
        Self {
            method,
            rejections,
            rate,
            se: (rate * (1.0 - rate) / reps as f64).sqrt(),
            p_values,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyReport {
    pub config: ScenarioConfig,
    pub param_name: String,
    pub param_value: String,
    pub methods: Vec<MethodSummary>,
    pub runtime_secs: f64,
}

impl StudyReport {
    pub fn method(&self, m: StudyMethod) -> Option<&MethodSummary> {
        self.methods.iter().find(|s| s.method == m)
    }
}

/// Rejection rates of the configured methods over independent replicates.
/// Replicate `b` draws from stream `b` of the seeded generator, so the
/// report does not depend on thread scheduling.
pub fn run_study(cfg: &ScenarioConfig) -> Result<StudyReport> {
    cfg.validate()?;
    let start = Instant::now();
    let test_cfg = TestConfig {
        alpha: cfg.alpha,
        ..TestConfig::default()
    };
    let per_rep: Vec<Vec<f64>> = (0..cfg.replicates as u64)
        .into_par_iter()
        .map(|b| {
            let ds = generate(cfg, b)?;
            cfg.methods
                .iter()
                .map(|m| {
                    match m {
                        StudyMethod::Qn => run_test(&ds, &test_cfg),
                        StudyMethod::Af => af_test(&ds, &test_cfg),
                    }
                    .map(|r| r.p_value)
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Vec<_>>()
        .into_iter()
        .enumerate()
        .map(|(b, r)| r.map_err(|e| e.context(format!("replicate {b}"))))
        .collect::<Result<_>>()?;
    let methods = cfg
        .methods
        .iter()
        .enumerate()
        .map(|(k, &m)| {
            MethodSummary::from_p_values(m, per_rep.iter().map(|p| p[k]).collect(), cfg.alpha)
        })
        .collect();
    let (name, value) = cfg.contrast();
    Ok(StudyReport {
        config: cfg.clone(),
        param_name: name.to_string(),
        param_value: value,
        methods,
        runtime_secs: start.elapsed().as_secs_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simgen::ScenarioKind;

    #[test]
    fn small_study_is_reproducible() {
        let mut cfg = ScenarioConfig::new(ScenarioKind::Vector);
        cfg.n1 = 15;
        cfg.n2 = 15;
        cfg.replicates = 6;
        cfg.methods = vec![StudyMethod::Qn, StudyMethod::Af];
        let a = run_study(&cfg).unwrap();
        let b = run_study(&cfg).unwrap();
        for m in [StudyMethod::Qn, StudyMethod::Af] {
            let (x, y) = (a.method(m).unwrap(), b.method(m).unwrap());
            assert_eq!(x.p_values, y.p_values);
            assert_eq!(x.p_values.len(), 6);
            assert!((0.0..=1.0).contains(&x.rate));
            let se = (x.rate * (1.0 - x.rate) / 6.0).sqrt();
            assert_eq!(x.se, se);
        }
    }

    #[test]
    fn rate_counts_strict_rejections() {
        let s = MethodSummary::from_p_values(StudyMethod::Qn, vec![0.01, 0.05, 0.2, 0.049], 0.05);
        assert_eq!(s.rejections, 2);
        assert_eq!(s.rate, 0.5);
        assert_eq!(s.se, 0.25);
    }
}
