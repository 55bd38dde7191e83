//! Command dispatch: flag and config resolution, execution, output routing.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use serde::{Deserialize, Serialize};

use eigadm_core::{
    compute_tau, heavy_tail_flag, mle, phi_star, psi_star, render_csv, render_json,
    reproduce_tables, run_selftest, simulate_risk_with_losses, write_report, CheckOutcome,
    EstimatorKind, McConfig, ReportFormat, ReportMetadata, ReportRow, RiskReport, RngStream,
    Scenario, Spectrum, TauPointMode,
};

use crate::{input, Cli, Command};

const DEFAULT_SEED: u64 = 42;
const DEFAULT_N_REP: usize = 10_000;
const DEFAULT_N_POINTS: usize = 1_000;

/// One-line error with its process exit code.
pub struct CliError {
    message: String,
    code: u8,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError { message: message.into(), code: 2 }
    }

    pub fn io(message: impl Into<String>) -> Self {
        CliError { message: message.into(), code: 3 }
    }
}

impl From<eigadm_core::Error> for CliError {
    fn from(e: eigadm_core::Error) -> Self {
        let code = match e {
            eigadm_core::Error::Io { .. } => 3,
            _ => 2,
        };
        CliError { message: e.to_string(), code }
    }
}

type CmdResult = Result<ExitCode, CliError>;

pub fn run(cli: Cli) -> ExitCode {
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

/// Optional settings loaded from `--config`; explicit flags win.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    seed: Option<u64>,
    threads: Option<usize>,
    n_rep: Option<usize>,
    n_points: Option<usize>,
    format: Option<String>,
}

fn load_config(path: Option<&Path>) -> Result<FileConfig, CliError> {
    let Some(path) = path else {
        return Ok(FileConfig::default());
    };
    let body = std::fs::read_to_string(path)
        .map_err(|e| CliError::io(format!("cannot read config {}: {e}", path.display())))?;
    serde_json::from_str(&body)
        .map_err(|e| CliError::usage(format!("invalid config {}: {e}", path.display())))
}

fn resolve_seed(flag: Option<u64>, config: &FileConfig) -> Result<u64, CliError> {
    if let Some(seed) = flag.or(config.seed) {
        return Ok(seed);
    }
    match std::env::var("EIGADM_SEED") {
        Ok(v) => v.trim().parse().map_err(|_| {
            CliError::usage(format!("EIGADM_SEED must be an unsigned 64-bit integer, got {v:?}"))
        }),
        Err(_) => Ok(DEFAULT_SEED),
    }
}

/// Install the requested global pool size; 0 keeps the default (all cores).
/// A sequential build accepts and ignores the flag.
fn configure_threads(threads: usize) -> Result<(), CliError> {
    #[cfg(feature = "parallel")]
    if threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::usage(format!("cannot configure {threads} threads: {e}")))?;
    }
    #[cfg(not(feature = "parallel"))]
    let _ = threads;
    Ok(())
}

fn parse_format(flag: Option<&str>, config: &FileConfig, default: ReportFormat) -> Result<ReportFormat, CliError> {
    match flag.or(config.format.as_deref()) {
        Some(s) => Ok(s.parse::<ReportFormat>()?),
        None => Ok(default),
    }
}

fn dispatch(cli: Cli) -> CmdResult {
    let config = load_config(cli.config.as_deref())?;
    let seed = resolve_seed(cli.seed, &config)?;
    configure_threads(cli.threads.or(config.threads).unwrap_or(0))?;
    match cli.command {
        Command::Estimate { input, nu, n_points, out } => {
            let n_points = n_points.or(config.n_points).unwrap_or(DEFAULT_N_POINTS);
            cmd_estimate(&input, nu, n_points, seed, out.as_deref())
        }
        Command::Risk {
            p,
            nu,
            lambda,
            estimator,
            n_rep,
            n_points,
            tau_points,
            out,
            format,
        } => {
            let n_rep = n_rep.or(config.n_rep).unwrap_or(DEFAULT_N_REP);
            let n_points = n_points.or(config.n_points).unwrap_or(DEFAULT_N_POINTS);
            let format = parse_format(format.as_deref(), &config, ReportFormat::Json)?;
            cmd_risk(RiskArgs {
                p,
                nu,
                lambda,
                estimator,
                n_rep,
                n_points,
                tau_points,
                seed,
                out,
                format,
            })
        }
        Command::Tables { table, n_rep, n_points, out, format } => {
            let n_rep = n_rep.or(config.n_rep).unwrap_or(DEFAULT_N_REP);
            let n_points = n_points.or(config.n_points).unwrap_or(DEFAULT_N_POINTS);
            let format = parse_format(format.as_deref(), &config, ReportFormat::Csv)?;
            cmd_tables(table, seed, n_rep, n_points, out.as_deref(), format)
        }
        Command::Selftest { inject_failure } => cmd_selftest(seed, inject_failure),
    }
}

#[derive(Serialize)]
struct EstimateOutput {
    l: Vec<f64>,
    nu: f64,
    seed: u64,
    n_points: usize,
    tau_row_sums: Vec<f64>,
    psi_star: Vec<f64>,
    phi_star: Vec<f64>,
    mle: Vec<f64>,
    ess: Vec<f64>,
}

fn cmd_estimate(input: &Path, nu: f64, n_points: usize, seed: u64, out: Option<&Path>) -> CmdResult {
    let l = input::read_spectrum(input)?;
    let tau = compute_tau(&l, nu, &McConfig::with_points(n_points), RngStream::new(seed))?;
    let est = psi_star(&l, tau)?;
    let doc = EstimateOutput {
        l: l.values().to_vec(),
        nu,
        seed,
        n_points,
        tau_row_sums: (0..l.len()).map(|i| est.tau.row_sum(i)).collect(),
        psi_star: est.psi.clone(),
        phi_star: phi_star(&l, nu)?,
        mle: mle(&l, nu)?,
        ess: est.ess,
    };
    let mut body = serde_json::to_string_pretty(&doc)
        .map_err(|e| CliError::usage(format!("cannot serialize estimate: {e}")))?;
    body.push('\n');
    emit_text(&body, out)?;
    Ok(ExitCode::SUCCESS)
}

struct RiskArgs {
    p: Option<usize>,
    nu: f64,
    lambda: String,
    estimator: String,
    n_rep: usize,
    n_points: usize,
    tau_points: Option<String>,
    seed: u64,
    out: Option<PathBuf>,
    format: ReportFormat,
}

fn cmd_risk(args: RiskArgs) -> CmdResult {
    let values = parse_lambda(&args.lambda)?;
    // Rejected rather than sorted: out-of-order input usually means the user
    // mixed up the convention, not that they wanted a silent sort.
    let lambda = Spectrum::population(values)?;
    if let Some(p) = args.p {
        if p != lambda.len() {
            return Err(CliError::usage(format!(
                "--p {p} does not match the {} eigenvalues in --lambda",
                lambda.len()
            )));
        }
    }
    let estimator: EstimatorKind = args.estimator.parse()?;
    let tau_points = match args.tau_points.as_deref() {
        None | Some("fresh") => TauPointMode::Fresh,
        Some("frozen") => TauPointMode::Frozen,
        Some(other) => {
            return Err(CliError::usage(format!(
                "unknown tau-points mode {other:?}; expected fresh or frozen"
            )))
        }
    };
    let mut scenario = Scenario::new(lambda, args.nu, estimator, args.seed);
    scenario.n_rep = args.n_rep;
    scenario.mc = McConfig::with_points(args.n_points);
    scenario.tau_points = tau_points;
    scenario.validate()?;
    let (est, losses) = simulate_risk_with_losses(&scenario)?;
    let heavy_tail = heavy_tail_flag(scenario.lambda.values(), args.nu, estimator, &losses)
        .into_iter()
        .collect();
    let report = RiskReport {
        metadata: ReportMetadata {
            seed: args.seed,
            n_points: args.n_points,
            n_rep: args.n_rep,
            version: env!("CARGO_PKG_VERSION").to_string(),
            wall_ms: None,
            heavy_tail,
        },
        rows: vec![ReportRow {
            lambda: scenario.lambda.values().to_vec(),
            nu: args.nu,
            estimator,
            risk: est.mean_loss,
            std_error: est.std_error,
        }],
    };
    emit_report(&report, args.format, args.out.as_deref())?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_tables(
    table: u8,
    seed: u64,
    n_rep: usize,
    n_points: usize,
    out: Option<&Path>,
    format: ReportFormat,
) -> CmdResult {
    let report = reproduce_tables(table, seed, n_rep, &McConfig::with_points(n_points))?;
    emit_report(&report, format, out)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_selftest(seed: u64, inject_failure: bool) -> CmdResult {
    let mut outcomes = run_selftest(seed);
    if inject_failure {
        outcomes.push(CheckOutcome {
            name: "injected-failure",
            passed: false,
            detail: "synthetic failure requested via --inject-failure".into(),
        });
    }
    let mut all_passed = true;
    for o in &outcomes {
        println!("[{}] {}: {}", if o.passed { "PASS" } else { "FAIL" }, o.name, o.detail);
        all_passed &= o.passed;
    }
    if all_passed {
        println!("selftest: all {} checks passed", outcomes.len());
        Ok(ExitCode::SUCCESS)
    } else {
        println!("selftest: at least one check failed");
        Ok(ExitCode::from(1))
    }
}

fn parse_lambda(raw: &str) -> Result<Vec<f64>, CliError> {
    raw.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<f64>()
                .map_err(|_| CliError::usage(format!("--lambda entry {:?} is not a number", tok.trim())))
        })
        .collect()
}

fn emit_text(body: &str, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, body)
            .map_err(|e| CliError::io(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn emit_report(report: &RiskReport, format: ReportFormat, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(path) => Ok(write_report(report, path, format)?),
        None => {
            let body = match format {
                ReportFormat::Csv => render_csv(report),
                ReportFormat::Json => render_json(report)?,
            };
            print!("{body}");
            Ok(())
        }
    }
}
