use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use repfrechet::baselines::{resampled_af, ResamplePlan};
use repfrechet::inference::{DEFAULT_MC_DRAWS, DEFAULT_MC_SEED};
use repfrechet::io::{
    load_dataset, load_vector_csv, study_csv, test_report_csv, to_json, BaselineConfig,
    BaselineReport, LoadOptions, StudyFile, TestReport,
};
use repfrechet::simgen::{
    run_study, GroupParams, RSpec, ScenarioConfig, ScenarioKind, StudyMethod,
};
use repfrechet::{run_test, Dataset, Error, PValueMethod, TestConfig, TestMode};

const EXIT_USAGE: u8 = 1;
const EXIT_VALIDATION: u8 = 2;
const EXIT_CALIBRATION: u8 = 3;

#[derive(Parser)]
#[command(
    name = "repfrechet",
    version,
    about = "Fréchet test for repeatedly observed random objects"
)]
struct Cli {
    /// Worker threads (default: all cores; 1 runs serially).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Test equality of Fréchet means, variances and within-subject variabilities.
    Test(TestArgs),
    /// Rejection rates over simulated datasets.
    Simulate(SimulateArgs),
    /// Subject-averaged test on balanced resamples with p-value aggregation.
    Baseline(BaselineArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Quadrature,
    Mc,
}

impl From<MethodArg> for PValueMethod {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Quadrature => PValueMethod::Quadrature,
            MethodArg::Mc => PValueMethod::MonteCarlo,
        }
    }
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct TestArgs {
    /// Dataset file (JSON, or long-format CSV for vectors).
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    #[arg(long, value_enum, default_value = "quadrature")]
    pvalue_method: MethodArg,
    #[arg(long, default_value_t = DEFAULT_MC_DRAWS)]
    mc_draws: usize,
    /// Seed of the Monte Carlo null sample.
    #[arg(long, default_value_t = DEFAULT_MC_SEED)]
    seed: u64,
    /// Drop the within-subject term (allows single-observation subjects).
    #[arg(long)]
    no_within: bool,
    /// Symmetrize Laplacians as (K + K^T)/2 before validation.
    #[arg(long)]
    symmetrize: bool,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long, value_parser = ["dist", "graph", "vector", "composite"])]
    scenario: String,
    #[arg(long, default_value_t = 100)]
    n1: usize,
    #[arg(long, default_value_t = 100)]
    n2: usize,
    /// Repeats per subject: an integer or `u123`; `A,B` sets both groups,
    /// a single value sets group 2 (group 1 keeps 2).
    #[arg(long, default_value = "2")]
    r_spec: String,
    /// Exchangeable correlation (group 2, or `A,B`).
    #[arg(long, default_value = "0.5")]
    iota: String,
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    beta: String,
    #[arg(long, default_value = "1")]
    eps: String,
    /// Edge toggles per repeat (networks).
    #[arg(long, default_value = "3")]
    tau: String,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    #[arg(long, default_value_t = 500)]
    reps: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Comma-separated tests: qn, af.
    #[arg(long, default_value = "qn")]
    methods: String,
    #[arg(long, default_value_t = 1000)]
    grid_size: usize,
    #[arg(long, default_value_t = 10)]
    nodes: usize,
    /// CSV destination (standard output when absent).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the full JSON report, including every p-value.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct BaselineArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_parser = ["af"], default_value = "af")]
    method: String,
    /// Common number of repeats; subjects with fewer are excluded.
    #[arg(long)]
    balanced_r: usize,
    #[arg(long, default_value_t = 500)]
    resamples: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    #[arg(long, value_enum, default_value = "quadrature")]
    pvalue_method: MethodArg,
    #[arg(long)]
    symmetrize: bool,
    #[arg(long)]
    output: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Run(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Run(e)
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error[usage]: --threads must be at least 1");
            return ExitCode::from(EXIT_USAGE);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error[usage]: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    }
    let outcome = match &cli.command {
        Command::Test(a) => cmd_test(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Baseline(a) => cmd_baseline(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error[usage]: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Run(e)) => {
            eprintln!("error[{}]: {e}", e.code());
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Calibration { .. } | Error::NoRepeatedMeasures { .. } | Error::Numeric(_) => {
            EXIT_CALIBRATION
        }
        _ => EXIT_VALIDATION,
    }
}

fn load(path: &Path, symmetrize: bool) -> Result<Dataset, Error> {
    let is_csv = path
        .extension()
        .is_some_and(|x| x.eq_ignore_ascii_case("csv"));
    if is_csv {
        load_vector_csv(path)
    } else {
        load_dataset(path, LoadOptions { symmetrize })
    }
}

fn emit(text: &str, dest: Option<&Path>) -> Result<(), Error> {
    match dest {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::Io(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn check_alpha(alpha: f64) -> Result<(), Failure> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Failure::Usage(format!("--alpha {alpha} is not in (0, 1)")))
    }
}

fn cmd_test(a: &TestArgs) -> Result<(), Failure> {
    check_alpha(a.alpha)?;
    if a.mc_draws == 0 {
        return Err(Failure::Usage("--mc-draws must be positive".into()));
    }
    let dataset = load(&a.input, a.symmetrize)?;
    let config = TestConfig {
        alpha: a.alpha,
        mode: if a.no_within {
            TestMode::Reduced
        } else {
            TestMode::Full
        },
        pvalue_method: a.pvalue_method.into(),
        mc_draws: a.mc_draws,
        mc_seed: a.seed,
    };
    let result = run_test(&dataset, &config)?;
    let report = TestReport::new(Some(a.input.display().to_string()), &config, &result);
    let text = match a.format {
        Format::Json => to_json(&report)?,
        Format::Csv => test_report_csv(&report)?,
    };
    emit(&text, a.output.as_deref())?;
    Ok(())
}

fn pair<T: std::str::FromStr + Clone>(
    flag: &str,
    raw: &str,
    group1_default: T,
) -> Result<(T, T), Failure> {
    let parse = |s: &str| {
        s.trim()
            .parse::<T>()
            .map_err(|_| Failure::Usage(format!("--{flag}: cannot parse '{s}'")))
    };
    match raw.split_once(',') {
        Some((x, y)) => Ok((parse(x)?, parse(y)?)),
        None => Ok((group1_default, parse(raw)?)),
    }
}

fn cmd_simulate(a: &SimulateArgs) -> Result<(), Failure> {
    let kind: ScenarioKind = a
        .scenario
        .parse()
        .map_err(|e: Error| Failure::Usage(e.to_string()))?;
    let base = GroupParams::default();
    let (r1, r2) = pair::<RSpec>("r-spec", &a.r_spec, base.r)?;
    let (i1, i2) = pair("iota", &a.iota, base.iota)?;
    let (b1, b2) = pair("beta", &a.beta, base.beta)?;
    let (e1, e2) = pair("eps", &a.eps, base.eps)?;
    let (t1, t2) = pair("tau", &a.tau, base.tau)?;
    let methods = a
        .methods
        .split(',')
        .map(|m| m.parse::<StudyMethod>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| Failure::Usage(e.to_string()))?;
    let cfg = ScenarioConfig {
        kind,
        n1: a.n1,
        n2: a.n2,
        group1: GroupParams {
            r: r1,
            iota: i1,
            beta: b1,
            eps: e1,
            tau: t1,
        },
        group2: GroupParams {
            r: r2,
            iota: i2,
            beta: b2,
            eps: e2,
            tau: t2,
        },
        grid_size: a.grid_size,
        nodes: a.nodes,
        alpha: a.alpha,
        replicates: a.reps,
        seed: a.seed,
        methods,
    };
    cfg.validate().map_err(|e| Failure::Usage(e.to_string()))?;
    let report = run_study(&cfg)?;
    emit(&study_csv(&report)?, a.out.as_deref())?;
    if let Some(p) = &a.json {
        emit(&to_json(&StudyFile::new(report))?, Some(p))?;
    }
    Ok(())
}

fn cmd_baseline(a: &BaselineArgs) -> Result<(), Failure> {
    check_alpha(a.alpha)?;
    let plan = ResamplePlan {
        target_r: a.balanced_r,
        replicates: a.resamples,
        seed: a.seed,
    };
    plan.validate().map_err(|e| Failure::Usage(e.to_string()))?;
    let dataset = load(&a.input, a.symmetrize)?;
    let config = TestConfig {
        alpha: a.alpha,
        pvalue_method: a.pvalue_method.into(),
        ..TestConfig::default()
    };
    let result = resampled_af(&dataset, &plan, &config)?;
    let report = BaselineReport::new(
        Some(a.input.display().to_string()),
        a.seed,
        BaselineConfig {
            method: a.method.clone(),
            balanced_r: a.balanced_r,
            resamples: a.resamples,
            alpha: a.alpha,
            pvalue_method: config.pvalue_method,
        },
        result,
    );
    emit(&to_json(&report)?, a.output.as_deref())?;
    Ok(())
}
