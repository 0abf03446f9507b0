//! Moment and dependence diagnostics of the joint companion state.
//!
//! The mixing check is a necessary-condition probe, not an estimate of
//! mixing coefficients: sample autocorrelations of the loss process must
//! decay, with a negative fitted log-linear slope, and high-order moments
//! must be stable across seeds.

use serde::{Deserialize, Serialize};

use crate::dgp::DgpSpec;
use crate::error::{Error, Result};
use crate::forecaster::{companion_state, PredictionRule, RuleSpace};
use crate::loss::BregmanLoss;
use crate::seed::derive_seed;

use super::stats;

/// Cross-seed empirical moment of one series at one order.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MomentEntry {
    pub order: u32,
    pub seed_a: f64,
    pub seed_b: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SeriesMoments {
    pub series: String,
    pub entries: Vec<MomentEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DiagnosticsReport {
    pub t_total: usize,
    pub max_lag: usize,
    /// Moments of |Y|, |H|, |f|, d up to order 2 r_m, with cross-seed ratios.
    pub moments: Vec<SeriesMoments>,
    /// Cross-seed ratio of the order-2 moment of |Y|.
    pub order2_ratio_y: f64,
    /// Loss-process autocorrelations at lags 1..=max_lag.
    pub loss_acf: Vec<f64>,
    /// Fitted slope of `ln |acf(l)|` on `l`; negative under geometric decay.
    pub acf_decay_slope: f64,
    pub acf_decay_ok: bool,
    pub acf_tail_below_head: bool,
    /// Max over a probe rule grid of |acf(10)| of the loss process.
    pub max_lag10_acf_over_rules: f64,
    /// Geometric envelopes C rho^l fitted to the companion-state
    /// autocorrelations: the mixing hook for the forecast and dominating
    /// processes.
    pub f_envelope: GeometricEnvelope,
    pub d_envelope: GeometricEnvelope,
    pub pass: bool,
}

/// A fitted geometric bound `|acf(l)| <= c * rho^l`; mixing-compatible when
/// `rho < 1` with a moderate constant.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GeometricEnvelope {
    pub rho: f64,
    pub c: f64,
    pub ok: bool,
}

fn fit_envelope(series: &[f64], max_lag: usize) -> GeometricEnvelope {
    let acf = stats::autocorrelations(series, max_lag);
    let lags: Vec<f64> = (1..=max_lag).map(|l| l as f64).collect();
    let logs: Vec<f64> = acf.iter().map(|r| r.abs().max(1e-10).ln()).collect();
    let (slope, _) = stats::ols_slope(&lags, &logs);
    let rho = slope.exp();
    // Smallest constant that dominates every lag with the fitted rho.
    let c = acf
        .iter()
        .enumerate()
        .map(|(i, r)| r.abs() / rho.powi(i as i32 + 1))
        .fold(0.0f64, f64::max);
    GeometricEnvelope {
        rho,
        c,
        ok: rho < 1.0 && c.is_finite() && c < 100.0,
    }
}

/// Runs the diagnostics on two derived seeds. `t_total` must be at least
/// 1e5 so the high-order moments and tail autocorrelations are meaningful.
pub fn run_diagnostics(
    spec: &DgpSpec,
    space: &RuleSpace,
    rule: &PredictionRule,
    loss: &BregmanLoss,
    t_total: usize,
    seed: u64,
) -> Result<DiagnosticsReport> {
    if t_total < 100_000 {
        return Err(Error::InvalidArgument(format!(
            "diagnostics need t_total >= 1e5, got {t_total}"
        )));
    }
    loss.check_pairing(space)?;
    let max_lag = 50usize;

    let trace_a = companion_state(spec, space, rule, t_total, derive_seed(seed, 0))?;
    let trace_b = companion_state(spec, space, rule, t_total, derive_seed(seed, 1))?;

    let orders: Vec<u32> = (1..=2 * spec.r_m).collect();
    let moment = |xs: &[f64], order: u32| -> f64 {
        xs.iter().map(|x| x.abs().powi(order as i32)).sum::<f64>() / xs.len() as f64
    };
    let mut moments = Vec::new();
    let mut order2_ratio_y = f64::NAN;
    for (name, a, b) in [
        ("y", &trace_a.y, &trace_b.y),
        ("h", &trace_a.h, &trace_b.h),
        ("f", &trace_a.f, &trace_b.f),
        ("d", &trace_a.d, &trace_b.d),
    ] {
        let entries: Vec<MomentEntry> = orders
            .iter()
            .map(|&order| {
                let ma = moment(a, order);
                let mb = moment(b, order);
                let ratio = if mb != 0.0 { ma / mb } else { f64::NAN };
                if name == "y" && order == 2 {
                    order2_ratio_y = ratio;
                }
                MomentEntry { order, seed_a: ma, seed_b: mb, ratio }
            })
            .collect();
        moments.push(SeriesMoments { series: name.to_string(), entries });
    }

    let losses_of = |trace: &crate::forecaster::JointTrace| -> Vec<f64> {
        (1..trace.y.len())
            .map(|t| loss.eval_raw(trace.y[t], trace.f[t]))
            .collect()
    };
    let losses = losses_of(&trace_a);
    let loss_acf = stats::autocorrelations(&losses, max_lag);
    let lags: Vec<f64> = (1..=max_lag).map(|l| l as f64).collect();
    let log_abs: Vec<f64> = loss_acf.iter().map(|r| r.abs().max(1e-10).ln()).collect();
    let (acf_decay_slope, _) = stats::ols_slope(&lags, &log_abs);
    let acf_decay_ok = acf_decay_slope < 0.0;
    let acf_tail_below_head = loss_acf[max_lag - 1].abs() < loss_acf[0].abs();

    // Uniformity-in-rule probe: lag-10 loss autocorrelation over the probe
    // grid, evaluated on the first seed's path.
    let mut max_lag10 = 0.0f64;
    for probe in space.probe_rules() {
        let trace = crate::forecaster::run(space, &probe, &trace_a.y, space.default_f0(), RuleSpace::DEFAULT_D0)?;
        let l: Vec<f64> = (1..trace_a.y.len())
            .map(|t| loss.eval_raw(trace_a.y[t], trace.f[t]))
            .collect();
        let acf = stats::autocorrelations(&l, 10);
        max_lag10 = max_lag10.max(acf[9].abs());
    }

    let f_envelope = fit_envelope(&trace_a.f, max_lag);
    let d_envelope = fit_envelope(&trace_a.d, max_lag);

    let moments_ok = order2_ratio_y > 0.9 && order2_ratio_y < 1.1;
    let pass = acf_decay_ok && acf_tail_below_head && moments_ok && f_envelope.ok && d_envelope.ok;
    Ok(DiagnosticsReport {
        t_total,
        max_lag,
        moments,
        order2_ratio_y,
        loss_acf,
        acf_decay_slope,
        acf_decay_ok,
        acf_tail_below_head,
        max_lag10_acf_over_rules: max_lag10,
        f_envelope,
        d_envelope,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dgp::{preset, PresetParams, YSpace};
    use crate::forecaster::Partition;
    use crate::loss::BregmanKind;

    fn square() -> BregmanLoss {
        BregmanLoss::new(BregmanKind::Square)
    }

    #[test]
    fn iid_chain_gives_near_zero_loss_autocorrelations() {
        // rho = 0 makes Y i.i.d.; a rule with tiny alpha1 and no feedback
        // produces near-independent losses.
        let params = PresetParams { rho: Some(0.0), ..Default::default() };
        let spec = preset("ar1_noise", &params).unwrap();
        let space = RuleSpace::default_real(Partition::single(YSpace::Real)).unwrap();
        let rule = PredictionRule::new(&space, vec![0.0], vec![0.02], vec![0.0]).unwrap();
        let n = 100_000;
        let report = run_diagnostics(&spec, &space, &rule, &square(), n, 3).unwrap();
        let band = 3.0 / (n as f64).sqrt();
        for (lag, rho) in report.loss_acf.iter().enumerate() {
            assert!(
                rho.abs() < band + 0.01,
                "lag {}: acf {} outside the i.i.d. band",
                lag + 1,
                rho
            );
        }
    }

    #[test]
    fn persistent_chain_shows_decaying_dependence() {
        let params = PresetParams { rho: Some(0.9), ..Default::default() };
        let spec = preset("ar1_noise", &params).unwrap();
        let space = RuleSpace::default_real(Partition::single(YSpace::Real)).unwrap();
        let rule = PredictionRule::new(&space, vec![0.0], vec![0.5], vec![0.3]).unwrap();
        let report = run_diagnostics(&spec, &space, &rule, &square(), 100_000, 9).unwrap();
        assert!(report.acf_decay_ok, "slope {}", report.acf_decay_slope);
        assert!(report.acf_tail_below_head);
        assert!(report.order2_ratio_y > 0.9 && report.order2_ratio_y < 1.1);
        // Companion-state mixing hook: (f, d) autocorrelations sit under a
        // geometric envelope with rho < 1.
        assert!(report.f_envelope.ok, "{:?}", report.f_envelope);
        assert!(report.d_envelope.ok, "{:?}", report.d_envelope);
        assert!(report.pass);
    }

    #[test]
    fn short_runs_are_rejected() {
        let params = PresetParams { rho: Some(0.5), ..Default::default() };
        let spec = preset("ar1_noise", &params).unwrap();
        let space = RuleSpace::default_real(Partition::single(YSpace::Real)).unwrap();
        let rule = PredictionRule::new(&space, vec![0.0], vec![0.5], vec![0.0]).unwrap();
        assert!(run_diagnostics(&spec, &space, &rule, &square(), 10_000, 1).is_err());
    }
}
