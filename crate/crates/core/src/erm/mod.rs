//! Empirical risk, its minimization, and out-of-sample risk estimation.
//!
//! The in-sample empirical risk of a rule is the average one-step prediction
//! loss along the path, with the forecaster started from the fixed rule-free
//! initial values. Out-of-sample risk comes in two flavors: the realized
//! average over an actual path continuation, and a latent-state-conditioned
//! Monte Carlo average over re-simulated continuations. The MC estimator
//! conditions on the full simulated state `(h_T, y_T, f_T, d_T)`, which is
//! exact for the conditional risk under the Markov structure of the joint
//! chain; it conditions on more than the observable history alone, and is
//! reported as such.

mod optimizer;

pub use optimizer::{minimize_box, OptConfig, OptOutcome};
pub(crate) use optimizer::grid_points;

use serde::{Deserialize, Serialize};

use crate::dgp::{simulate_from, DgpSpec, SimPath};
use crate::error::{Error, Result};
use crate::forecaster::{run, step, PredictionRule, RuleSpace};
use crate::loss::BregmanLoss;
use crate::seed::derive_seed;

/// An ERM problem: an in-sample path segment, a rule class, a loss, and the
/// out-of-sample horizon fraction.
#[derive(Debug, Clone)]
pub struct ErmProblem {
    /// In-sample segment; index 0 is the pre-sample observation `y_0`.
    pub path: SimPath,
    pub space: RuleSpace,
    pub loss: BregmanLoss,
    pub f0: f64,
    pub d0: f64,
    pub gamma: f64,
    /// Out-of-sample length, exactly `ceil(gamma * T)`.
    pub m: usize,
}

impl ErmProblem {
    pub fn new(path: SimPath, space: RuleSpace, loss: BregmanLoss, gamma: f64) -> Result<Self> {
        if path.len() < 2 {
            return Err(Error::InvalidArgument(
                "in-sample path needs a pre-sample value plus at least one observation".into(),
            ));
        }
        if !(gamma > 0.0) || !gamma.is_finite() {
            return Err(Error::InvalidArgument(format!("gamma must be positive, got {gamma}")));
        }
        loss.check_pairing(&space)?;
        let t = path.len() - 1;
        let m = (gamma * t as f64).ceil() as usize;
        let f0 = space.default_f0();
        Ok(Self {
            path,
            space,
            loss,
            f0,
            d0: RuleSpace::DEFAULT_D0,
            gamma,
            m,
        })
    }

    /// Number of in-sample observations T.
    pub fn t_in(&self) -> usize {
        self.path.len() - 1
    }
}

/// In-sample empirical risk, `(1/T) sum_{t=1..T} L(y_t, f_theta_t)`, with
/// full domain checking. Deterministic given its inputs.
pub fn empirical_risk(problem: &ErmProblem, rule: &PredictionRule) -> Result<f64> {
    let y = &problem.path.y;
    let mut f = problem.f0;
    let mut acc = 0.0;
    for t in 1..y.len() {
        f = step(&problem.space, rule, y[t - 1], f);
        acc += problem.loss.eval(y[t], f)?;
    }
    Ok(acc / (y.len() - 1) as f64)
}

/// Hot-path variant: domain violations surface as `+inf` instead of errors,
/// which direct search treats as a rejected candidate. Produces bit-identical
/// values to [`empirical_risk`] on valid inputs.
pub fn empirical_risk_raw(problem: &ErmProblem, rule: &PredictionRule) -> f64 {
    let y = &problem.path.y;
    let mut f = problem.f0;
    let mut acc = 0.0;
    for t in 1..y.len() {
        f = step(&problem.space, rule, y[t - 1], f);
        acc += problem.loss.eval_raw(y[t], f);
    }
    let risk = acc / (y.len() - 1) as f64;
    if risk.is_finite() {
        risk
    } else {
        f64::INFINITY
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitStatus {
    Converged,
    MaxIter,
    Boundary,
}

/// Optimizer trace summary.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FitTrace {
    pub starts: usize,
    pub iterations: usize,
    pub grid_evaluations: usize,
    pub best_per_start: Vec<f64>,
}

/// Result of empirical risk minimization.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FitResult {
    pub rule: PredictionRule,
    pub objective: f64,
    pub status: FitStatus,
    pub trace: FitTrace,
    /// Per-start local optima; useful as reference candidates downstream.
    pub candidates: Vec<PredictionRule>,
}

/// Minimizes an arbitrary objective over the rule class with the shared
/// multi-start machinery. Ties between equal minima resolve to the first
/// point encountered in the fixed scan order.
pub fn fit_criterion<F: FnMut(&PredictionRule) -> f64>(
    space: &RuleSpace,
    mut objective: F,
    opt: &OptConfig,
) -> Result<FitResult> {
    let (lo, hi) = space.flat_bounds();
    let k = space.k();
    let mut f = |x: &[f64]| {
        let rule = PredictionRule::from_flat_unchecked(k, x);
        objective(&rule)
    };
    let outcome = minimize_box(&mut f, &lo, &hi, opt);
    if !outcome.value.is_finite() {
        return Err(Error::FitFailed(format!(
            "objective not finite after {} starts ({} iterations)",
            outcome.start_values.len(),
            outcome.iterations
        )));
    }
    let rule = PredictionRule::from_flat_unchecked(k, &outcome.x);
    let boundary = outcome
        .x
        .iter()
        .zip(lo.iter().zip(&hi))
        .any(|(x, (l, h))| (x - l).abs() < 1e-6 || (h - x).abs() < 1e-6);
    let status = if boundary {
        FitStatus::Boundary
    } else if outcome.converged {
        FitStatus::Converged
    } else {
        FitStatus::MaxIter
    };
    let candidates = outcome
        .start_points
        .iter()
        .map(|x| PredictionRule::from_flat_unchecked(k, x))
        .collect();
    Ok(FitResult {
        rule,
        objective: outcome.value,
        status,
        trace: FitTrace {
            starts: outcome.start_values.len(),
            iterations: outcome.iterations,
            grid_evaluations: outcome.grid_evaluations,
            best_per_start: outcome.start_values,
        },
        candidates,
    })
}

/// Empirical risk minimization over the problem's rule class.
pub fn fit(problem: &ErmProblem, opt: &OptConfig) -> Result<FitResult> {
    fit_criterion(&problem.space, |rule| empirical_risk_raw(problem, rule), opt)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RiskKind {
    RealizedOos,
    LatentConditionedMc,
}

/// A risk value with a Monte Carlo standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RiskEstimate {
    pub value: f64,
    pub std_error: f64,
    pub kind: RiskKind,
    pub n_mc: usize,
}

/// Joint state at the end of the in-sample run, the conditioning point for
/// Monte Carlo continuation risks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatentState {
    pub h: f64,
    pub y: f64,
    pub f: f64,
    pub d: f64,
}

/// Runs the forecaster over the in-sample path and returns the terminal
/// conditioning state for `rule`.
pub fn terminal_state(problem: &ErmProblem, rule: &PredictionRule) -> Result<LatentState> {
    let trace = run(&problem.space, rule, &problem.path.y, problem.f0, problem.d0)?;
    let t = problem.path.len() - 1;
    Ok(LatentState {
        h: problem.path.h[t],
        y: problem.path.y[t],
        f: trace.f[t],
        d: trace.d[t],
    })
}

/// Realized out-of-sample risk: the forecaster state carries over from the
/// in-sample run (the recursion is never reset) and the losses over the
/// continuation `oos_y` (length exactly `m`) are averaged. The standard
/// error is the dependence-naive `sd / sqrt(m)`.
pub fn oos_risk_realized(
    problem: &ErmProblem,
    rule: &PredictionRule,
    oos_y: &[f64],
) -> Result<RiskEstimate> {
    if oos_y.len() != problem.m {
        return Err(Error::LengthMismatch(format!(
            "out-of-sample segment has {} observations, problem.m = {}",
            oos_y.len(),
            problem.m
        )));
    }
    let y_in = &problem.path.y;
    let mut f = problem.f0;
    let mut y_prev = y_in[0];
    for t in 1..y_in.len() {
        f = step(&problem.space, rule, y_prev, f);
        y_prev = y_in[t];
    }
    let mut losses = Vec::with_capacity(oos_y.len());
    for &y_t in oos_y {
        f = step(&problem.space, rule, y_prev, f);
        losses.push(problem.loss.eval(y_t, f)?);
        y_prev = y_t;
    }
    let (mean, se) = mean_and_se(&losses);
    Ok(RiskEstimate {
        value: mean,
        std_error: se,
        kind: RiskKind::RealizedOos,
        n_mc: 1,
    })
}

/// Shared Monte Carlo continuations drawn once and reused across rules
/// (common random numbers).
#[derive(Debug, Clone)]
pub struct Continuations {
    pub y: Vec<Vec<f64>>,
    pub h: Vec<Vec<f64>>,
    pub m: usize,
}

/// Draws `n_mc` fresh continuations of length `m` from the chain state
/// `h_start`; continuation `j` uses the stream `derive_seed(seed, j)`.
pub fn simulate_continuations(
    spec: &DgpSpec,
    h_start: f64,
    n_mc: usize,
    m: usize,
    seed: u64,
) -> Result<Continuations> {
    if n_mc == 0 {
        return Err(Error::InvalidArgument("n_mc must be at least 1".into()));
    }
    let mut y = Vec::with_capacity(n_mc);
    let mut h = Vec::with_capacity(n_mc);
    for j in 0..n_mc {
        let mut rng = crate::seed::rng_from(derive_seed(seed, j as u64));
        let (yj, hj) = simulate_from(spec, h_start, m, &mut rng)?;
        y.push(yj);
        h.push(hj);
    }
    Ok(Continuations { y, h, m })
}

/// Which series the loss is evaluated against on a continuation: the
/// observed series, or the latent chain (volatility-prediction risk).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RiskTarget {
    Observed,
    LatentChain,
}

/// Average continuation loss of one rule over shared continuations. The
/// forecaster always runs on the observed series; `target` picks what it is
/// scored against.
pub fn mc_risk(
    space: &RuleSpace,
    loss: &BregmanLoss,
    rule: &PredictionRule,
    state: &LatentState,
    conts: &Continuations,
    target: RiskTarget,
) -> Result<RiskEstimate> {
    let mut per_cont = Vec::with_capacity(conts.y.len());
    for (yj, hj) in conts.y.iter().zip(&conts.h) {
        let mut f = state.f;
        let mut y_prev = state.y;
        let mut acc = 0.0;
        for i in 0..yj.len() {
            f = step(space, rule, y_prev, f);
            let u = match target {
                RiskTarget::Observed => yj[i],
                RiskTarget::LatentChain => hj[i],
            };
            acc += loss.eval(u, f)?;
            y_prev = yj[i];
        }
        per_cont.push(acc / yj.len() as f64);
    }
    let (mean, se) = mean_and_se(&per_cont);
    Ok(RiskEstimate {
        value: mean,
        std_error: se,
        kind: RiskKind::LatentConditionedMc,
        n_mc: conts.y.len(),
    })
}

/// Latent-state-conditioned Monte Carlo out-of-sample risk over `n_mc`
/// fresh continuations of length `problem.m`.
pub fn oos_risk_mc(
    problem: &ErmProblem,
    spec: &DgpSpec,
    rule: &PredictionRule,
    state: &LatentState,
    n_mc: usize,
    seed: u64,
) -> Result<RiskEstimate> {
    let conts = simulate_continuations(spec, state.h, n_mc, problem.m, seed)?;
    mc_risk(&problem.space, &problem.loss, rule, state, &conts, RiskTarget::Observed)
}

/// Configuration of the excess-risk reference set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExcessConfig {
    /// Reference grid resolution per coordinate.
    pub grid_per_coord: usize,
    pub n_mc: usize,
    pub seed: u64,
}

impl Default for ExcessConfig {
    fn default() -> Self {
        Self {
            grid_per_coord: 7,
            n_mc: 40,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExcessReport {
    /// `R(theta_hat) - min over the reference set of R(theta)`, evaluated
    /// with common random numbers; nonnegative by self-inclusion.
    pub excess: f64,
    pub risk_theta_hat: RiskEstimate,
    pub reference_min: f64,
    pub n_reference: usize,
    pub theta_hat_is_argmin: bool,
}

/// Excess out-of-sample risk of `theta_hat` against a reference set (fine
/// grid, any extra candidates, and `theta_hat` itself), all evaluated on the
/// same simulated continuations.
pub fn excess_risk(
    problem: &ErmProblem,
    spec: &DgpSpec,
    theta_hat: &PredictionRule,
    extra_candidates: &[PredictionRule],
    cfg: &ExcessConfig,
) -> Result<ExcessReport> {
    let (lo, hi) = problem.space.flat_bounds();
    let k = problem.space.k();
    let mut rules: Vec<PredictionRule> =
        optimizer::grid_points(&lo, &hi, cfg.grid_per_coord, 20_000, derive_seed(cfg.seed, 0xF1))
            .iter()
            .map(|x| PredictionRule::from_flat_unchecked(k, x))
            .collect();
    rules.extend_from_slice(extra_candidates);
    rules.push(theta_hat.clone());

    let t = problem.path.len() - 1;
    let h_t = problem.path.h[t];
    let conts = simulate_continuations(spec, h_t, cfg.n_mc, problem.m, derive_seed(cfg.seed, 0xC0))?;

    let mut reference_min = f64::INFINITY;
    let mut min_index = 0usize;
    let mut risk_hat = None;
    let last = rules.len() - 1;
    for (i, rule) in rules.iter().enumerate() {
        let state = terminal_state(problem, rule)?;
        let est = mc_risk(&problem.space, &problem.loss, rule, &state, &conts, RiskTarget::Observed)?;
        if est.value < reference_min {
            reference_min = est.value;
            min_index = i;
        }
        if i == last {
            risk_hat = Some(est);
        }
    }
    let risk_theta_hat = risk_hat.expect("reference set is nonempty");
    Ok(ExcessReport {
        excess: risk_theta_hat.value - reference_min,
        risk_theta_hat,
        reference_min,
        n_reference: rules.len(),
        theta_hat_is_argmin: min_index == last,
    })
}

fn mean_and_se(values: &[f64]) -> (f64, f64) {
    // Degenerate spread (e.g. zero-noise continuations) is exactly zero;
    // a naive sequential mean of equal values rounds an ulp away from them.
    if values.iter().all(|v| v.to_bits() == values[0].to_bits()) {
        return (values[0], 0.0);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dgp::{preset, simulate_with_burnin, PresetParams, YSpace};
    use crate::forecaster::Partition;
    use crate::loss::{BregmanKind, BregmanLoss};
    use crate::seed::rng_for;
    use approx::assert_relative_eq;
    use rand::Rng;

    fn const_path(values: Vec<f64>) -> SimPath {
        SimPath {
            h: vec![0.0; values.len()],
            y: values,
            seed: 0,
            spec_id: "fixture".into(),
        }
    }

    fn real_problem(y: Vec<f64>) -> ErmProblem {
        let space = RuleSpace::default_real(Partition::single(YSpace::Real)).unwrap();
        ErmProblem::new(const_path(y), space, BregmanLoss::new(BregmanKind::Square), 0.5).unwrap()
    }

    #[test]
    fn perfect_one_lag_prediction_of_a_constant_path_has_zero_risk() {
        let problem = real_problem(vec![1.0, 1.0, 1.0, 1.0]);
        let rule = PredictionRule::new(&problem.space, vec![0.0], vec![1.0], vec![0.0]).unwrap();
        assert_eq!(empirical_risk(&problem, &rule).unwrap(), 0.0);
    }

    #[test]
    fn hand_computed_risk_on_a_two_step_path() {
        // y0 = 2, observations (2, 2), theta = (0, 0.5, 0):
        // f1 = 1, f2 = 1, losses (1, 1), mean 1.
        let problem = real_problem(vec![2.0, 2.0, 2.0]);
        let rule = PredictionRule::new(&problem.space, vec![0.0], vec![0.5], vec![0.0]).unwrap();
        assert_relative_eq!(empirical_risk(&problem, &rule).unwrap(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn qlike_risk_matches_an_independent_loop_oracle() {
        let params = PresetParams { rho: Some(0.9), ..Default::default() };
        let spec = preset("sv_returns", &params).unwrap();
        let path = simulate_with_burnin(&spec, 10, 3).unwrap();
        let space = RuleSpace::default_nonneg(Partition::single(YSpace::NonNeg)).unwrap();
        let problem =
            ErmProblem::new(path, space, BregmanLoss::new(BregmanKind::GammaQlike), 0.5).unwrap();
        let rule =
            PredictionRule::new(&problem.space, vec![0.4], vec![0.3], vec![0.2]).unwrap();

        // Oracle: explicit recursion and the QLIKE formula written out.
        let y = &problem.path.y;
        let mut f_prev = problem.f0;
        let mut oracle = 0.0;
        for t in 1..y.len() {
            let f = 0.4 + 0.3 * y[t - 1] + 0.2 * f_prev;
            oracle += y[t] / f - (y[t] / f).ln() - 1.0;
            f_prev = f;
        }
        oracle /= (y.len() - 1) as f64;

        let risk = empirical_risk(&problem, &rule).unwrap();
        assert!((risk - oracle).abs() <= 1e-12 * (1.0 + oracle.abs()));
        assert_eq!(risk, empirical_risk_raw(&problem, &rule));
    }

    #[test]
    fn risk_is_bit_stable_across_calls() {
        let problem = real_problem(vec![0.3, -0.8, 1.2, 0.4, -0.1]);
        let rule = PredictionRule::new(&problem.space, vec![0.1], vec![0.7], vec![0.3]).unwrap();
        let a = empirical_risk(&problem, &rule).unwrap();
        let b = empirical_risk(&problem, &rule).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn fit_attains_zero_risk_on_a_degenerate_constant_path() {
        let problem = real_problem(vec![2.0; 60]);
        let result = fit(&problem, &OptConfig::default()).unwrap();
        assert!(
            result.objective < 1e-8,
            "objective {} on a perfectly predictable path",
            result.objective
        );
        assert_relative_eq!(
            empirical_risk(&problem, &result.rule).unwrap(),
            result.objective,
            epsilon = 1e-12
        );
    }

    #[test]
    fn fit_beats_one_hundred_random_probes() {
        let params = PresetParams { rho: Some(0.5), ..Default::default() };
        let spec = preset("ar1_noise", &params).unwrap();
        let path = simulate_with_burnin(&spec, 400, 8).unwrap();
        let space = RuleSpace::default_real(Partition::single(YSpace::Real)).unwrap();
        let problem =
            ErmProblem::new(path, space, BregmanLoss::new(BregmanKind::Square), 0.25).unwrap();
        let result = fit(&problem, &OptConfig::default()).unwrap();

        let (lo, hi) = problem.space.flat_bounds();
        let mut rng = rng_for(777, 0);
        for _ in 0..100 {
            let x: Vec<f64> = lo.iter().zip(&hi).map(|(l, h)| rng.random_range(*l..=*h)).collect();
            let probe = PredictionRule::from_flat(&problem.space, &x).unwrap();
            assert!(result.objective <= empirical_risk(&problem, &probe).unwrap() + 1e-15);
        }
    }

    #[test]
    fn fit_is_deterministic() {
        let problem = real_problem(vec![0.1, 0.9, -0.4, 1.3, 0.2, 0.8, -0.2, 0.5]);
        let a = fit(&problem, &OptConfig::default()).unwrap();
        let b = fit(&problem, &OptConfig::default()).unwrap();
        assert_eq!(a.rule, b.rule);
        assert_eq!(a.objective.to_bits(), b.objective.to_bits());
    }

    #[test]
    fn realized_oos_matches_a_loop_oracle_and_length_checks() {
        let problem = real_problem(vec![0.5, 1.0, -0.5, 0.25, 0.75]); // T = 4, m = 2
        assert_eq!(problem.m, 2);
        let rule = PredictionRule::new(&problem.space, vec![0.2], vec![0.6], vec![0.1]).unwrap();
        let oos = vec![0.4, -0.6];
        let est = oos_risk_realized(&problem, &rule, &oos).unwrap();

        // Oracle: run the full recursion explicitly.
        let mut f = 0.0;
        let full: Vec<f64> = problem.path.y.iter().chain(&oos).copied().collect();
        let mut losses = Vec::new();
        for t in 1..full.len() {
            f = 0.2 + 0.6 * full[t - 1] + 0.1 * f;
            if t > 4 {
                losses.push((full[t] - f) * (full[t] - f));
            }
        }
        let oracle = losses.iter().sum::<f64>() / losses.len() as f64;
        assert!((est.value - oracle).abs() <= 1e-12 * (1.0 + oracle.abs()));

        assert!(oos_risk_realized(&problem, &rule, &oos[..1]).is_err());
    }

    #[test]
    fn zero_noise_mc_risk_is_deterministic_with_zero_std_error() {
        let params = PresetParams {
            rho: Some(0.5),
            sigma_h: Some(0.0),
            sigma_y: Some(0.0),
            mu_h: Some(1.0),
            ..Default::default()
        };
        let spec = preset("ar1_noise", &params).unwrap();
        let path = crate::dgp::simulate(&spec, 21, 4).unwrap();
        let space = RuleSpace::default_real(Partition::single(YSpace::Real)).unwrap();
        let problem =
            ErmProblem::new(path, space, BregmanLoss::new(BregmanKind::Square), 0.5).unwrap();
        let rule = PredictionRule::new(&problem.space, vec![0.3], vec![0.4], vec![0.2]).unwrap();
        let state = terminal_state(&problem, &rule).unwrap();
        let est = oos_risk_mc(&problem, &spec, &rule, &state, 8, 11).unwrap();
        assert_eq!(est.std_error, 0.0);

        // And it coincides with the realized continuation of the same chain.
        let mut rng = rng_for(0, 0);
        let (oos_y, _) = simulate_from(&spec, state.h, problem.m, &mut rng).unwrap();
        let realized = oos_risk_realized(&problem, &rule, &oos_y).unwrap();
        assert_relative_eq!(est.value, realized.value, epsilon = 1e-12);
    }

    #[test]
    fn single_continuation_mc_equals_realized_on_the_same_stream() {
        let params = PresetParams { rho: Some(0.5), ..Default::default() };
        let spec = preset("ar1_noise", &params).unwrap();
        let path = simulate_with_burnin(&spec, 50, 6).unwrap();
        let space = RuleSpace::default_real(Partition::single(YSpace::Real)).unwrap();
        let problem =
            ErmProblem::new(path, space, BregmanLoss::new(BregmanKind::Square), 0.4).unwrap();
        let rule = PredictionRule::new(&problem.space, vec![0.1], vec![0.5], vec![0.3]).unwrap();
        let state = terminal_state(&problem, &rule).unwrap();

        let seed = 99;
        let est_mc = oos_risk_mc(&problem, &spec, &rule, &state, 1, seed).unwrap();
        let mut rng = crate::seed::rng_from(derive_seed(seed, 0));
        let (oos_y, _) = simulate_from(&spec, state.h, problem.m, &mut rng).unwrap();
        let est_real = oos_risk_realized(&problem, &rule, &oos_y).unwrap();
        assert_eq!(est_mc.value.to_bits(), est_real.value.to_bits());
    }

    #[test]
    fn std_error_expectation_shrinks_with_more_continuations() {
        let params = PresetParams { rho: Some(0.5), ..Default::default() };
        let spec = preset("ar1_noise", &params).unwrap();
        let path = simulate_with_burnin(&spec, 100, 12).unwrap();
        let space = RuleSpace::default_real(Partition::single(YSpace::Real)).unwrap();
        let problem =
            ErmProblem::new(path, space, BregmanLoss::new(BregmanKind::Square), 0.3).unwrap();
        let rule = PredictionRule::new(&problem.space, vec![0.0], vec![0.4], vec![0.3]).unwrap();
        let state = terminal_state(&problem, &rule).unwrap();

        let avg_se = |n_mc: usize| {
            (0..10)
                .map(|s| {
                    oos_risk_mc(&problem, &spec, &rule, &state, n_mc, 1000 + s)
                        .unwrap()
                        .std_error
                })
                .sum::<f64>()
                / 10.0
        };
        assert!(avg_se(32) < avg_se(8));
    }

    #[test]
    fn excess_risk_is_nonnegative_by_self_inclusion() {
        let params = PresetParams { rho: Some(0.5), ..Default::default() };
        let spec = preset("ar1_noise", &params).unwrap();
        let path = simulate_with_burnin(&spec, 300, 14).unwrap();
        let space = RuleSpace::default_real(Partition::single(YSpace::Real)).unwrap();
        let problem =
            ErmProblem::new(path, space, BregmanLoss::new(BregmanKind::Square), 0.25).unwrap();
        let result = fit(&problem, &OptConfig::default()).unwrap();
        let report = excess_risk(
            &problem,
            &spec,
            &result.rule,
            &result.candidates,
            &ExcessConfig { grid_per_coord: 5, n_mc: 16, seed: 2 },
        )
        .unwrap();
        assert!(report.excess >= 0.0);
        assert!(report.n_reference > 125);
    }

    #[test]
    fn excess_risk_is_exactly_zero_without_noise() {
        let params = PresetParams {
            rho: Some(0.5),
            sigma_h: Some(0.0),
            sigma_y: Some(0.0),
            mu_h: Some(1.0),
            ..Default::default()
        };
        let spec = preset("ar1_noise", &params).unwrap();
        let path = crate::dgp::simulate(&spec, 41, 4).unwrap();
        let space = RuleSpace::default_real(Partition::single(YSpace::Real)).unwrap();
        let problem =
            ErmProblem::new(path, space, BregmanLoss::new(BregmanKind::Square), 0.5).unwrap();
        // On a deterministic path, the exact one-step rule has zero risk.
        let result = fit(&problem, &OptConfig::default()).unwrap();
        let report = excess_risk(
            &problem,
            &spec,
            &result.rule,
            &[],
            &ExcessConfig { grid_per_coord: 5, n_mc: 4, seed: 3 },
        )
        .unwrap();
        assert!(report.excess.abs() < 1e-10);
    }
}
