//! Command implementations. Every command parses the config strictly,
//! resolves defaults, runs, and writes artifacts that embed the resolved
//! config and the master seed. Reruns with the same config are
//! byte-identical.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use erm_forecast::dgp::{self, simulate_with_burnin, validate_assumption1};
use erm_forecast::erm::{
    excess_risk, fit, oos_risk_mc, oos_risk_realized, terminal_state, ErmProblem, ExcessConfig,
    FitResult, RiskEstimate,
};
use erm_forecast::experiments::{run_diagnostics, run_rate_study, RateStudyConfig};
use erm_forecast::loss::certify_condition1;
use erm_forecast::report;
use erm_forecast::seed::derive_seed;

use crate::config::{CliResult, Resolved, RunConfig};

/// Exit code 2 marks "ran fine, checks failed" for CI gates.
pub struct CommandError {
    pub code: i32,
    pub message: String,
}

impl CommandError {
    fn run(message: impl Into<String>) -> Self {
        Self { code: 1, message: message.into() }
    }
}

impl From<String> for CommandError {
    fn from(message: String) -> Self {
        CommandError::run(message)
    }
}

type CmdResult = Result<(), CommandError>;

#[derive(Serialize)]
struct Artifact<'a, T: Serialize> {
    config: &'a RunConfig,
    master_seed: u64,
    report: T,
}

fn load(config_path: &Path, seed: Option<u64>, out: Option<PathBuf>) -> CliResult<Resolved> {
    let text = fs::read_to_string(config_path)
        .map_err(|e| format!("cannot read config {}: {e}", config_path.display()))?;
    let parsed = RunConfig::from_toml(&text)?;
    Ok(Resolved::new(
        parsed,
        seed,
        out.map(|p| p.to_string_lossy().into_owned()),
    ))
}

fn write_file(dir: &str, name: &str, bytes: &[u8]) -> CliResult<()> {
    fs::create_dir_all(dir).map_err(|e| format!("cannot create {dir}: {e}"))?;
    let path = Path::new(dir).join(name);
    fs::write(&path, bytes).map_err(|e| format!("cannot write {}: {e}", path.display()))
}

fn write_json<T: Serialize>(resolved: &Resolved, name: &str, report: T) -> CliResult<()> {
    let artifact = Artifact {
        config: &resolved.echo,
        master_seed: resolved.master_seed,
        report,
    };
    let json = report::to_json_pretty(&artifact).map_err(|e| format!("{e}"))?;
    write_file(&resolved.out_dir, name, json.as_bytes())
}

pub fn cmd_simulate(config: &Path, seed: Option<u64>, out: Option<PathBuf>) -> CmdResult {
    let mut resolved = load(config, seed, out)?;
    let spec = resolved.build_spec()?;
    let t_total = resolved.t_total()?;
    let path = dgp::simulate(&spec, t_total, derive_seed(resolved.master_seed, 1))
        .map_err(|e| CommandError::run(e.to_string()))?;
    let mut csv = Vec::new();
    report::write_path_csv(&path, &mut csv).map_err(|e| CommandError::run(e.to_string()))?;
    write_file(&resolved.out_dir, "path.csv", &csv)?;

    #[derive(Serialize)]
    struct SimulateReport {
        spec_id: String,
        t_total: usize,
        rows: usize,
    }
    write_json(
        &resolved,
        "simulate.json",
        SimulateReport {
            spec_id: path.spec_id.clone(),
            t_total,
            rows: path.len(),
        },
    )?;
    Ok(())
}

pub fn cmd_check(config: &Path, seed: Option<u64>, out: Option<PathBuf>) -> CmdResult {
    let mut resolved = load(config, seed, out)?;
    let spec = resolved.build_spec()?;
    let space = resolved.build_space(&spec)?;
    let loss = resolved.build_loss()?;
    let validation = validate_assumption1(&spec, 200_000, derive_seed(resolved.master_seed, 2))
        .map_err(|e| CommandError::run(e.to_string()))?;
    let condition1 = certify_condition1(&loss, &space, &spec, 20_000, derive_seed(resolved.master_seed, 3))
        .map_err(|e| CommandError::run(e.to_string()))?;

    #[derive(Serialize)]
    struct CheckReport {
        validation: erm_forecast::dgp::ValidationReport,
        condition1: erm_forecast::loss::Condition1Report,
        pass: bool,
    }
    let pass = validation.pass && condition1.pass;
    write_json(&resolved, "check.json", CheckReport { validation, condition1, pass })?;
    if !pass {
        return Err(CommandError {
            code: 2,
            message: "check failed: see check.json".into(),
        });
    }
    Ok(())
}

#[derive(Serialize)]
struct RiskBlock {
    realized: RiskEstimate,
    mc: RiskEstimate,
}

#[derive(Serialize)]
struct FitReport {
    theta_hat: erm_forecast::forecaster::PredictionRule,
    objective: f64,
    status: erm_forecast::erm::FitStatus,
    trace: erm_forecast::erm::FitTrace,
    risks: RiskBlock,
}

fn fit_pipeline(resolved: &mut Resolved) -> CliResult<(dgp::DgpSpec, ErmProblem, FitResult, RiskBlock)> {
    let spec = resolved.build_spec()?;
    let space = resolved.build_space(&spec)?;
    let loss = resolved.build_loss()?;
    let opt = resolved.build_opt()?;
    let gamma = resolved.gamma()?;
    let n_mc = resolved.n_mc()?;
    let t_in = resolved.t_total()?;
    let m = (gamma * t_in as f64).ceil() as usize;

    let full = simulate_with_burnin(&spec, t_in + m, derive_seed(resolved.master_seed, 1))
        .map_err(|e| format!("{e}"))?;
    let in_path = full.segment(0, t_in + 1).map_err(|e| format!("{e}"))?;
    let oos_y = full.y[t_in + 1..].to_vec();
    let problem = ErmProblem::new(in_path, space, loss, gamma).map_err(|e| format!("{e}"))?;
    let fitted = fit(&problem, &opt).map_err(|e| format!("{e}"))?;
    let realized = oos_risk_realized(&problem, &fitted.rule, &oos_y).map_err(|e| format!("{e}"))?;
    let state = terminal_state(&problem, &fitted.rule).map_err(|e| format!("{e}"))?;
    let mc = oos_risk_mc(
        &problem,
        &spec,
        &fitted.rule,
        &state,
        n_mc,
        derive_seed(resolved.master_seed, 5),
    )
    .map_err(|e| format!("{e}"))?;
    Ok((spec, problem, fitted, RiskBlock { realized, mc }))
}

pub fn cmd_fit(config: &Path, seed: Option<u64>, out: Option<PathBuf>) -> CmdResult {
    let mut resolved = load(config, seed, out)?;
    let (_spec, _problem, fitted, risks) = fit_pipeline(&mut resolved)?;
    write_json(
        &resolved,
        "fit.json",
        FitReport {
            theta_hat: fitted.rule.clone(),
            objective: fitted.objective,
            status: fitted.status,
            trace: fitted.trace,
            risks,
        },
    )?;
    Ok(())
}

pub fn cmd_evaluate(config: &Path, seed: Option<u64>, out: Option<PathBuf>) -> CmdResult {
    let mut resolved = load(config, seed, out)?;
    let excess_grid = resolved.study_excess_grid();
    let n_mc = resolved.n_mc()?;
    let (spec, problem, fitted, risks) = fit_pipeline(&mut resolved)?;
    let excess = excess_risk(
        &problem,
        &spec,
        &fitted.rule,
        &fitted.candidates,
        &ExcessConfig {
            grid_per_coord: excess_grid,
            n_mc,
            seed: derive_seed(resolved.master_seed, 6),
        },
    )
    .map_err(|e| format!("{e}"))?;

    #[derive(Serialize)]
    struct EvaluateReport {
        #[serde(flatten)]
        fit: FitReport,
        excess: erm_forecast::erm::ExcessReport,
    }
    write_json(
        &resolved,
        "evaluate.json",
        EvaluateReport {
            fit: FitReport {
                theta_hat: fitted.rule.clone(),
                objective: fitted.objective,
                status: fitted.status,
                trace: fitted.trace,
                risks,
            },
            excess,
        },
    )?;
    Ok(())
}

pub fn cmd_study(config: &Path, seed: Option<u64>, out: Option<PathBuf>) -> CmdResult {
    let mut resolved = load(config, seed, out)?;
    let (preset, preset_params) = resolved.preset_params()?;
    let loss = resolved.build_loss()?;
    let opt = resolved.build_opt()?;
    let cfg = RateStudyConfig {
        t_grid: resolved.study_t_grid(),
        replications: resolved.study_replications(),
        preset,
        preset_params,
        loss: loss.kind,
        k: resolved
            .echo
            .rule
            .as_ref()
            .and_then(|r| r.k)
            .unwrap_or(1),
        gamma: resolved.gamma()?,
        n_mc: resolved.n_mc()?,
        excess_grid: resolved.study_excess_grid(),
        opt,
        master_seed: resolved.master_seed,
    };
    let report = run_rate_study(&cfg).map_err(|e| CommandError::run(e.to_string()))?;
    eprintln!("study runtime: {:.1}s", report.runtime_seconds);

    let mut csv = Vec::new();
    report::write_rate_rows_csv(&report, &mut csv).map_err(|e| CommandError::run(e.to_string()))?;
    write_file(&resolved.out_dir, "study.csv", &csv)?;
    write_json(&resolved, "study.json", report)?;
    Ok(())
}

pub fn cmd_diagnose(config: &Path, seed: Option<u64>, out: Option<PathBuf>) -> CmdResult {
    let mut resolved = load(config, seed, out)?;
    let spec = resolved.build_spec()?;
    let space = resolved.build_space(&spec)?;
    let loss = resolved.build_loss()?;
    let rule = resolved.concrete_rule(&space)?;
    let t_total = resolved.t_total()?;
    let report = run_diagnostics(
        &spec,
        &space,
        &rule,
        &loss,
        t_total,
        derive_seed(resolved.master_seed, 6),
    )
    .map_err(|e| CommandError::run(e.to_string()))?;

    let mut csv = Vec::new();
    report::write_acf_csv(&report.loss_acf, &mut csv).map_err(|e| CommandError::run(e.to_string()))?;
    write_file(&resolved.out_dir, "loss_acf.csv", &csv)?;
    write_json(&resolved, "diagnose.json", report)?;
    Ok(())
}
