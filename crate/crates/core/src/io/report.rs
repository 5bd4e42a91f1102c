use serde::{Deserialize, Serialize};

use crate::baselines::AggregatedResult;
use crate::diagnostics::Diagnostic;
use crate::error::{Error, Result};
use crate::estimators::GroupSummary;
use crate::inference::{NullCalibration, TestComponents, TestConfig, TestMode, TestResult};
use crate::simgen::StudyReport;

pub const TOOL_NAME: &str = "repfrechet";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Pretty JSON with a trailing newline. Floats use the shortest decimal
/// representation that parses back to the same double.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::Io(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

/// Group estimates without the Fréchet mean object.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupRecord {
    pub name: String,
    pub n_subjects: usize,
    pub n_obs: usize,
    pub lambda_hat: f64,
    pub v_hat: f64,
    pub rho_hat: Option<f64>,
    pub sigma2_hat: f64,
    pub gamma2_hat: Option<f64>,
    pub cross_cov_hat: Option<f64>,
    pub xi_hat: Option<f64>,
    pub diagnostics: Vec<Diagnostic>,
}

impl From<&GroupSummary> for GroupRecord {
    fn from(s: &GroupSummary) -> Self {
        Self {
            name: s.name.clone(),
            n_subjects: s.n_subjects,
            n_obs: s.n_obs,
            lambda_hat: s.lambda_hat,
            v_hat: s.v_hat,
            rho_hat: s.rho_hat,
            sigma2_hat: s.sigma2_hat,
            gamma2_hat: s.gamma2_hat,
            cross_cov_hat: s.cross_cov_hat,
            xi_hat: s.xi_hat,
            diagnostics: s.diagnostics.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestRecord {
    pub mode: TestMode,
    pub q_n: f64,
    pub components: TestComponents,
    pub calibration: NullCalibration,
    pub p_value: f64,
    pub critical_value: f64,
    pub alpha: f64,
    pub reject: bool,
    pub n_obs: usize,
    pub pooled_v_hat: f64,
    pub groups: Vec<GroupRecord>,
    pub diagnostics: Vec<Diagnostic>,
}

impl From<&TestResult> for TestRecord {
    fn from(r: &TestResult) -> Self {
        Self {
            mode: r.mode,
            q_n: r.components.q_n,
            components: r.components.clone(),
            calibration: r.calibration.clone(),
            p_value: r.p_value,
            critical_value: r.critical_value,
            alpha: r.alpha,
            reject: r.reject,
            n_obs: r.n_obs,
            pooled_v_hat: r.pooled_v_hat,
            groups: r.group_summaries.iter().map(GroupRecord::from).collect(),
            diagnostics: r.diagnostics.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestReport {
    pub tool: String,
    pub version: String,
    pub seed: u64,
    pub input: Option<String>,
    pub config: TestConfig,
    pub result: TestRecord,
}

impl TestReport {
    pub fn new(input: Option<String>, config: &TestConfig, result: &TestResult) -> Self {
        Self {
            tool: TOOL_NAME.into(),
            version: TOOL_VERSION.into(),
            seed: config.mc_seed,
            input,
            config: config.clone(),
            result: result.into(),
        }
    }
}

/// Two-column `field,value` rendering of a test report.
pub fn test_report_csv(report: &TestReport) -> Result<String> {
    let r = &report.result;
    let c = &r.components;
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    let mut rows: Vec<(String, String)> = vec![
        ("tool".into(), report.tool.clone()),
        ("version".into(), report.version.clone()),
        ("seed".into(), report.seed.to_string()),
        ("input".into(), report.input.clone().unwrap_or_default()),
        ("mode".into(), format!("{:?}", r.mode).to_lowercase()),
        ("q_n".into(), r.q_n.to_string()),
        ("d_n".into(), c.d_n.to_string()),
        ("u_n".into(), c.u_n.to_string()),
        ("r_n".into(), opt(c.r_n)),
        ("mean_term".into(), c.mean_term.to_string()),
        ("variance_term".into(), c.variance_term.to_string()),
        ("within_term".into(), opt(c.within_term)),
        ("p_value".into(), r.p_value.to_string()),
        ("critical_value".into(), r.critical_value.to_string()),
        ("alpha".into(), r.alpha.to_string()),
        ("reject".into(), r.reject.to_string()),
        ("n_obs".into(), r.n_obs.to_string()),
        ("pooled_v_hat".into(), r.pooled_v_hat.to_string()),
    ];
    for (i, phi) in r.calibration.eigenvalues.iter().enumerate() {
        rows.push((format!("phi_{}", i + 1), phi.to_string()));
    }
    for g in &r.groups {
        let p = format!("group.{}", g.name);
        rows.push((format!("{p}.n_subjects"), g.n_subjects.to_string()));
        rows.push((format!("{p}.n_obs"), g.n_obs.to_string()));
        rows.push((format!("{p}.lambda_hat"), g.lambda_hat.to_string()));
        rows.push((format!("{p}.v_hat"), g.v_hat.to_string()));
        rows.push((format!("{p}.rho_hat"), opt(g.rho_hat)));
        rows.push((format!("{p}.sigma2_hat"), g.sigma2_hat.to_string()));
        rows.push((format!("{p}.gamma2_hat"), opt(g.gamma2_hat)));
        rows.push((format!("{p}.cross_cov_hat"), opt(g.cross_cov_hat)));
        rows.push((format!("{p}.xi_hat"), opt(g.xi_hat)));
    }
    write_csv(
        &["field", "value"],
        rows.iter().map(|(a, b)| vec![a.clone(), b.clone()]),
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyFile {
    pub tool: String,
    pub version: String,
    pub seed: u64,
    pub report: StudyReport,
}

impl StudyFile {
    pub fn new(report: StudyReport) -> Self {
        Self {
            tool: TOOL_NAME.into(),
            version: TOOL_VERSION.into(),
            seed: report.config.seed,
            report,
        }
    }
}

/// One row per method: scenario, contrasted parameter, counts, rate, SE
/// and seed. Runtime is left out so identical runs give identical bytes.
pub fn study_csv(report: &StudyReport) -> Result<String> {
    let header = [
        "scenario",
        "param_name",
        "param_value",
        "method",
        "replicates",
        "rejections",
        "rate",
        "se",
        "seed",
    ];
    let rows = report.methods.iter().map(|m| {
        vec![
            report.config.kind.name().to_string(),
            report.param_name.clone(),
            report.param_value.clone(),
            m.method.name().to_string(),
            m.p_values.len().to_string(),
            m.rejections.to_string(),
            m.rate.to_string(),
            m.se.to_string(),
            report.config.seed.to_string(),
        ]
    });
    write_csv(&header, rows)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineConfig {
    pub method: String,
    pub balanced_r: usize,
    pub resamples: usize,
    pub alpha: f64,
    pub pvalue_method: crate::inference::PValueMethod,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineReport {
    pub tool: String,
    pub version: String,
    pub seed: u64,
    pub input: Option<String>,
    pub config: BaselineConfig,
    pub result: AggregatedResult,
    pub reject: bool,
}

impl BaselineReport {
    pub fn new(
        input: Option<String>,
        seed: u64,
        config: BaselineConfig,
        result: AggregatedResult,
    ) -> Self {
        let reject = result.overall_p < config.alpha;
        Self {
            tool: TOOL_NAME.into(),
            version: TOOL_VERSION.into(),
            seed,
            input,
            config,
            result,
            reject,
        }
    }
}

fn write_csv<I>(header: &[&str], rows: I) -> Result<String>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(header).map_err(io)?;
    for row in rows {
        w.write_record(&row).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::baselines::aggregate_p_values;
    use crate::simgen::{run_study, ScenarioConfig, ScenarioKind};

    #[test]
    fn study_csv_has_one_row_per_method() {
        let mut cfg = ScenarioConfig::new(ScenarioKind::Vector);
        cfg.n1 = 10;
        cfg.n2 = 10;
        cfg.replicates = 1;
        let report = run_study(&cfg).unwrap();
        let csv = study_csv(&report).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 2);
        assert!(lines[0].starts_with("scenario,param_name,param_value,method,replicates"));
        assert!(lines[1].starts_with("vector,none,,qn,1,"));
        assert_eq!(csv, study_csv(&run_study(&cfg).unwrap()).unwrap());

        let file = StudyFile::new(report);
        let back: StudyFile = serde_json::from_str(&to_json(&file).unwrap()).unwrap();
        assert_eq!(back, file);
    }

    #[test]
    fn baseline_report_round_trips() {
        let cfg = BaselineConfig {
            method: "af".into(),
            balanced_r: 2,
            resamples: 2,
            alpha: 0.05,
            pvalue_method: crate::inference::PValueMethod::Quadrature,
        };
        let r = BaselineReport::new(None, 3, cfg, aggregate_p_values(&[0.1, 1.0 / 3.0]).unwrap());
        let back: BaselineReport = serde_json::from_str(&to_json(&r).unwrap()).unwrap();
        assert_eq!(back, r);
    }
}
