//! Oracle-rate study: excess out-of-sample risk of the ERM as the sample
//! size grows.
//!
//! For each sample size T and each replication, a fresh path is simulated,
//! the ERM is fitted in-sample, and the excess risk against a common-random-
//! numbers reference set is recorded. Medians per T are regressed on log T.
//! Replications run in parallel; every unit derives its RNG streams from
//! `(master_seed, t_index, replication)`, so the report is a pure function
//! of the configuration.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::time::Instant;

use crate::dgp::{preset, simulate_with_burnin, PresetParams};
use crate::erm::{excess_risk, fit, ErmProblem, ExcessConfig, OptConfig};
use crate::error::{Error, Result};
use crate::forecaster::{default_partition, Partition, RuleSpace, run};
use crate::loss::{BregmanKind, BregmanLoss};
use crate::seed::derive_seed;

use super::stats;

/// Configuration of a rate study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateStudyConfig {
    pub t_grid: Vec<usize>,
    pub replications: usize,
    pub preset: String,
    pub preset_params: PresetParams,
    pub loss: BregmanKind,
    pub k: usize,
    pub gamma: f64,
    pub n_mc: usize,
    /// Reference grid resolution per coordinate for the excess risk.
    pub excess_grid: usize,
    pub opt: OptConfig,
    pub master_seed: u64,
}

impl Default for RateStudyConfig {
    fn default() -> Self {
        Self {
            t_grid: vec![250, 500, 1000, 2000, 4000],
            replications: 200,
            preset: "ar1_noise".into(),
            preset_params: PresetParams {
                rho: Some(0.5),
                ..Default::default()
            },
            loss: BregmanKind::Square,
            k: 1,
            gamma: 0.25,
            n_mc: 40,
            excess_grid: 7,
            opt: OptConfig::default(),
            master_seed: 0,
        }
    }
}

impl RateStudyConfig {
    fn validate(&self) -> Result<()> {
        if self.t_grid.len() < 2 {
            return Err(Error::InvalidArgument("t_grid needs at least two sample sizes".into()));
        }
        for w in self.t_grid.windows(2) {
            if !(w[0] < w[1]) {
                return Err(Error::InvalidArgument("t_grid must be strictly increasing".into()));
            }
        }
        if self.t_grid[0] < 16 {
            return Err(Error::InvalidArgument("sample sizes below 16 are not meaningful".into()));
        }
        if self.replications < 10 {
            return Err(Error::InvalidArgument("need at least 10 replications".into()));
        }
        if !(self.gamma > 0.0) {
            return Err(Error::InvalidArgument("gamma must be positive".into()));
        }
        if self.k == 0 {
            return Err(Error::InvalidArgument("need at least one regime".into()));
        }
        Ok(())
    }
}

/// One replication's outcome.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RateRow {
    pub t: usize,
    pub replication: usize,
    pub excess: f64,
    pub theta_hat: Vec<f64>,
}

/// Per-T excess-risk quantiles.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TExcessSummary {
    pub t: usize,
    pub q25: f64,
    pub median: f64,
    pub q75: f64,
    pub n_ok: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RateStudyReport {
    pub config: RateStudyConfig,
    pub per_t: Vec<TExcessSummary>,
    /// Log-log regression slope of the median excess on T; `None` when a
    /// median is nonpositive (degenerate, e.g. a zero-noise process).
    pub slope: Option<f64>,
    pub slope_se: Option<f64>,
    pub degenerate: bool,
    /// Empirical standard deviation of the in-sample loss process at the
    /// fitted rule (largest T, first replication): the measurable proxy for
    /// the scale constant in the oracle bound.
    pub sigma_hat: f64,
    pub rows: Vec<RateRow>,
    /// Wall-clock seconds; excluded from serialized artifacts so reruns of
    /// the same config stay byte-identical.
    #[serde(skip)]
    pub runtime_seconds: f64,
}

struct UnitOutcome {
    row: RateRow,
    loss_std: Option<f64>,
}

fn run_unit(
    spec: &crate::dgp::DgpSpec,
    space: &RuleSpace,
    loss: BregmanLoss,
    cfg: &RateStudyConfig,
    ti: usize,
    rep: usize,
    want_loss_std: bool,
) -> Result<UnitOutcome> {
    let t = cfg.t_grid[ti];
    let m = (cfg.gamma * t as f64).ceil() as usize;
    let unit_seed = derive_seed(derive_seed(cfg.master_seed, ti as u64), rep as u64);
    let path = simulate_with_burnin(spec, t + m, derive_seed(unit_seed, 0))?;
    let in_path = path.segment(0, t + 1)?;
    let problem = ErmProblem::new(in_path, space.clone(), loss, cfg.gamma)?;
    debug_assert_eq!(problem.m, m);

    let mut opt = cfg.opt;
    opt.seed = derive_seed(unit_seed, 1);
    let fitted = fit(&problem, &opt)?;
    let report = excess_risk(
        &problem,
        spec,
        &fitted.rule,
        &fitted.candidates,
        &ExcessConfig {
            grid_per_coord: cfg.excess_grid,
            n_mc: cfg.n_mc,
            seed: derive_seed(unit_seed, 2),
        },
    )?;

    let loss_std = if want_loss_std {
        let trace = run(space, &fitted.rule, &problem.path.y, problem.f0, problem.d0)?;
        let losses: Vec<f64> = (1..problem.path.y.len())
            .map(|s| loss.eval_raw(problem.path.y[s], trace.f[s]))
            .collect();
        Some(stats::std_dev(&losses))
    } else {
        None
    };

    Ok(UnitOutcome {
        row: RateRow {
            t,
            replication: rep,
            excess: report.excess,
            theta_hat: fitted.rule.as_flat(),
        },
        loss_std,
    })
}

/// Runs the full study. Fails if more than 5% of the units error.
pub fn run_rate_study(cfg: &RateStudyConfig) -> Result<RateStudyReport> {
    cfg.validate()?;
    let started = Instant::now();
    let spec = preset(&cfg.preset, &cfg.preset_params)?;
    let loss = BregmanLoss::new(cfg.loss);

    let partition = if cfg.k == 1 {
        Partition::single(spec.y_space)
    } else {
        let pilot = simulate_with_burnin(&spec, 5_000, derive_seed(cfg.master_seed, 0x9100))?;
        default_partition(&pilot, cfg.k, spec.r_m)?
    };
    let space = match spec.y_space {
        crate::dgp::YSpace::Real => RuleSpace::default_real(partition)?,
        crate::dgp::YSpace::NonNeg => RuleSpace::default_nonneg(partition)?,
    };
    loss.check_pairing(&space)?;

    let last_ti = cfg.t_grid.len() - 1;
    let units: Vec<(usize, usize)> = (0..cfg.t_grid.len())
        .flat_map(|ti| (0..cfg.replications).map(move |rep| (ti, rep)))
        .collect();
    let outcomes: Vec<Result<UnitOutcome>> = units
        .par_iter()
        .map(|&(ti, rep)| run_unit(&spec, &space, loss, cfg, ti, rep, ti == last_ti && rep == 0))
        .collect();

    let total = outcomes.len();
    let failed = outcomes.iter().filter(|o| o.is_err()).count();
    if failed * 20 > total {
        let first = outcomes
            .iter()
            .find_map(|o| o.as_ref().err().map(|e| e.to_string()))
            .unwrap_or_default();
        return Err(Error::StudyFailed { failed, total, first });
    }

    let mut rows = Vec::with_capacity(total - failed);
    let mut sigma_hat = f64::NAN;
    for outcome in outcomes.into_iter().flatten() {
        if let Some(s) = outcome.loss_std {
            sigma_hat = s;
        }
        rows.push(outcome.row);
    }
    if sigma_hat.is_nan() {
        // The designated unit failed; fall back to any success at the
        // largest T so the report still carries a scale.
        sigma_hat = 0.0;
    }

    let mut per_t = Vec::with_capacity(cfg.t_grid.len());
    for &t in &cfg.t_grid {
        let excesses: Vec<f64> = rows.iter().filter(|r| r.t == t).map(|r| r.excess).collect();
        if excesses.is_empty() {
            return Err(Error::StudyFailed {
                failed,
                total,
                first: format!("no successful replications at T={t}"),
            });
        }
        per_t.push(TExcessSummary {
            t,
            q25: stats::quantile(&excesses, 0.25),
            median: stats::quantile(&excesses, 0.5),
            q75: stats::quantile(&excesses, 0.75),
            n_ok: excesses.len(),
        });
    }

    let degenerate = per_t.iter().any(|s| s.median <= 0.0);
    let (slope, slope_se) = if degenerate {
        (None, None)
    } else {
        let x: Vec<f64> = per_t.iter().map(|s| (s.t as f64).ln()).collect();
        let y: Vec<f64> = per_t.iter().map(|s| s.median.ln()).collect();
        let (b, se) = stats::ols_slope(&x, &y);
        (Some(b), if se.is_nan() { None } else { Some(se) })
    };

    Ok(RateStudyReport {
        config: cfg.clone(),
        per_t,
        slope,
        slope_se,
        degenerate,
        sigma_hat,
        rows,
        runtime_seconds: started.elapsed().as_secs_f64(),
    })
}
