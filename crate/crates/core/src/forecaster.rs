//! The K-regime recursive threshold forecaster and its dominating process.
//!
//! A prediction rule theta = (alpha0_k, alpha1_k, beta1_k)_{k=1..K} maps the
//! previous observation and the previous forecast to the next forecast,
//! switching coefficients by the regime of the previous observation. The
//! dominating process `d_t = 1 + |y_{t-1}| + |f_{t-1}| + beta1_bar d_{t-1}`
//! bounds how far the forecasts of two nearby rules can drift apart:
//! `|f_theta[t] - f_theta'[t]| <= ||theta - theta'||_2 * d_theta'[t]`.
//!
//! All operations here are pure functions of their inputs; traces are
//! immutable after construction, so many rules can be evaluated on a shared
//! path in parallel.

use serde::{Deserialize, Serialize};

use crate::dgp::{simulate, DgpSpec, SimPath, YSpace};
use crate::error::{Error, Result};

/// A known partition of the observation space into left-closed regime
/// intervals `[r_j, r_{j+1})`. The first cell is `(-inf, r_2)` on the real
/// line and `[0, r_2)` on the nonnegative half line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Partition {
    breakpoints: Vec<f64>,
    y_space: YSpace,
}

impl Partition {
    /// Builds a partition with `breakpoints.len() + 1` regimes, enforcing
    /// the moment constraint `K < (r_m - 2) / 3`.
    pub fn new(y_space: YSpace, breakpoints: Vec<f64>, r_m: u32) -> Result<Self> {
        let k = breakpoints.len() + 1;
        let limit = (r_m as f64 - 2.0) / 3.0;
        if (k as f64) >= limit {
            return Err(Error::PartitionTooLarge { k, r_m, limit });
        }
        for w in breakpoints.windows(2) {
            if !(w[0] < w[1]) {
                return Err(Error::InvalidArgument(format!(
                    "breakpoints must be strictly increasing, got {} then {}",
                    w[0], w[1]
                )));
            }
        }
        for &b in &breakpoints {
            if !b.is_finite() {
                return Err(Error::InvalidArgument("breakpoints must be finite".into()));
            }
            if y_space == YSpace::NonNeg && b <= 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "breakpoints must exceed the implicit r_1 = 0, got {b}"
                )));
            }
        }
        Ok(Self { breakpoints, y_space })
    }

    /// Single-regime partition (no breakpoints).
    pub fn single(y_space: YSpace) -> Self {
        Self { breakpoints: Vec::new(), y_space }
    }

    pub fn k(&self) -> usize {
        self.breakpoints.len() + 1
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn y_space(&self) -> YSpace {
        self.y_space
    }

    /// Regime index of `y` (0-based). Total over the observation space;
    /// exactly one regime fires. A breakpoint belongs to the regime on its
    /// right (left-closed intervals).
    #[inline]
    pub fn regime(&self, y: f64) -> usize {
        self.breakpoints.partition_point(|b| *b <= y)
    }
}

/// The class of prediction rules: a coefficient box over a fixed partition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuleSpace {
    pub alpha0: (f64, f64),
    pub alpha1: (f64, f64),
    pub beta1_upper: f64,
    pub partition: Partition,
}

impl RuleSpace {
    pub fn new(
        alpha0: (f64, f64),
        alpha1: (f64, f64),
        beta1_upper: f64,
        partition: Partition,
    ) -> Result<Self> {
        if !(alpha0.0 < alpha0.1) || !(alpha1.0 < alpha1.1) {
            return Err(Error::InvalidArgument("coefficient bounds must be ordered".into()));
        }
        if !(alpha1.0 > 0.0) {
            return Err(Error::InvalidArgument("alpha1 lower bound must be positive".into()));
        }
        if !(0.0..1.0).contains(&beta1_upper) {
            return Err(Error::InvalidArgument(format!(
                "beta1 upper bound must lie in [0, 1), got {beta1_upper}"
            )));
        }
        if partition.y_space() == YSpace::NonNeg && !(alpha0.0 > 0.0) {
            return Err(Error::InvalidArgument(
                "alpha0 lower bound must be strictly positive on the nonnegative space".into(),
            ));
        }
        for v in [alpha0.0, alpha0.1, alpha1.0, alpha1.1, beta1_upper] {
            if !v.is_finite() {
                return Err(Error::InvalidArgument("bounds must be finite".into()));
            }
        }
        Ok(Self { alpha0, alpha1, beta1_upper, partition })
    }

    /// Default box for real-valued series.
    pub fn default_real(partition: Partition) -> Result<Self> {
        Self::new((-2.0, 2.0), (0.01, 1.5), 0.9, partition)
    }

    /// Default box for nonnegative series.
    pub fn default_nonneg(partition: Partition) -> Result<Self> {
        Self::new((0.005, 2.0), (0.01, 1.5), 0.95, partition)
    }

    pub fn y_space(&self) -> YSpace {
        self.partition.y_space()
    }

    pub fn k(&self) -> usize {
        self.partition.k()
    }

    /// Dimension of the rule vector, p = 3K.
    pub fn dim(&self) -> usize {
        3 * self.k()
    }

    /// Fixed rule-free initial forecast: the smallest valid value.
    pub fn default_f0(&self) -> f64 {
        match self.y_space() {
            YSpace::Real => 0.0,
            YSpace::NonNeg => self.alpha0.0,
        }
    }

    /// Fixed initial value of the dominating process.
    pub const DEFAULT_D0: f64 = 1.0;

    /// Lower bound of the forecast space: `alpha0_lower` on the nonnegative
    /// space, unbounded on the real line.
    pub fn forecast_lower_bound(&self) -> Option<f64> {
        match self.y_space() {
            YSpace::Real => None,
            YSpace::NonNeg => Some(self.alpha0.0),
        }
    }

    /// Nine probe rules: the corners and the center of the per-regime
    /// coefficient box, replicated across regimes. Used wherever a cheap
    /// deterministic sup over the rule class is needed.
    pub fn probe_rules(&self) -> Vec<PredictionRule> {
        let k = self.k();
        let a0 = [self.alpha0.0, self.alpha0.1];
        let a1 = [self.alpha1.0, self.alpha1.1];
        let b1 = [0.0, self.beta1_upper];
        let mut rules = Vec::with_capacity(9);
        for &x in &a0 {
            for &y in &a1 {
                for &z in &b1 {
                    rules.push(PredictionRule {
                        alpha0: vec![x; k],
                        alpha1: vec![y; k],
                        beta1: vec![z; k],
                    });
                }
            }
        }
        rules.push(PredictionRule {
            alpha0: vec![0.5 * (self.alpha0.0 + self.alpha0.1); k],
            alpha1: vec![0.5 * (self.alpha1.0 + self.alpha1.1); k],
            beta1: vec![0.5 * self.beta1_upper; k],
        });
        rules
    }

    /// Box bounds in flat coordinates (alpha0 block, alpha1 block, beta1 block).
    pub fn flat_bounds(&self) -> (Vec<f64>, Vec<f64>) {
        let k = self.k();
        let mut lo = Vec::with_capacity(3 * k);
        let mut hi = Vec::with_capacity(3 * k);
        for _ in 0..k {
            lo.push(self.alpha0.0);
            hi.push(self.alpha0.1);
        }
        for _ in 0..k {
            lo.push(self.alpha1.0);
            hi.push(self.alpha1.1);
        }
        for _ in 0..k {
            lo.push(0.0);
            hi.push(self.beta1_upper);
        }
        (lo, hi)
    }
}

/// A prediction rule: one coefficient triple per regime.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionRule {
    pub alpha0: Vec<f64>,
    pub alpha1: Vec<f64>,
    pub beta1: Vec<f64>,
}

impl PredictionRule {
    pub fn new(space: &RuleSpace, alpha0: Vec<f64>, alpha1: Vec<f64>, beta1: Vec<f64>) -> Result<Self> {
        let k = space.k();
        if alpha0.len() != k || alpha1.len() != k || beta1.len() != k {
            return Err(Error::InvalidArgument(format!(
                "rule needs {k} coefficients per block, got ({}, {}, {})",
                alpha0.len(),
                alpha1.len(),
                beta1.len()
            )));
        }
        for j in 0..k {
            let inside = space.alpha0.0 <= alpha0[j]
                && alpha0[j] <= space.alpha0.1
                && space.alpha1.0 <= alpha1[j]
                && alpha1[j] <= space.alpha1.1
                && 0.0 <= beta1[j]
                && beta1[j] <= space.beta1_upper;
            if !inside {
                return Err(Error::InvalidArgument(format!(
                    "regime {j} coefficients ({}, {}, {}) outside the rule-space box",
                    alpha0[j], alpha1[j], beta1[j]
                )));
            }
        }
        Ok(Self { alpha0, alpha1, beta1 })
    }

    pub fn k(&self) -> usize {
        self.alpha0.len()
    }

    /// Flat coordinates: alpha0[1..K], alpha1[1..K], beta1[1..K].
    pub fn as_flat(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(3 * self.k());
        v.extend_from_slice(&self.alpha0);
        v.extend_from_slice(&self.alpha1);
        v.extend_from_slice(&self.beta1);
        v
    }

    /// Builds a rule from flat coordinates without box validation. For
    /// optimizer internals where the point is already projected into the box.
    pub(crate) fn from_flat_unchecked(k: usize, flat: &[f64]) -> Self {
        debug_assert_eq!(flat.len(), 3 * k);
        Self {
            alpha0: flat[..k].to_vec(),
            alpha1: flat[k..2 * k].to_vec(),
            beta1: flat[2 * k..].to_vec(),
        }
    }

    pub fn from_flat(space: &RuleSpace, flat: &[f64]) -> Result<Self> {
        let k = space.k();
        if flat.len() != 3 * k {
            return Err(Error::InvalidArgument(format!(
                "flat rule vector needs length {}, got {}",
                3 * k,
                flat.len()
            )));
        }
        Self::new(
            space,
            flat[..k].to_vec(),
            flat[k..2 * k].to_vec(),
            flat[2 * k..].to_vec(),
        )
    }

    /// Euclidean distance between two rule vectors.
    pub fn distance_l2(&self, other: &Self) -> f64 {
        let a = self.as_flat();
        let b = other.as_flat();
        a.iter()
            .zip(&b)
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt()
    }
}

/// Forecast and dominating-process trace aligned with the driving path:
/// index 0 holds the initial values, index t the step-t states.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForecastTrace {
    pub f: Vec<f64>,
    pub d: Vec<f64>,
    pub f0: f64,
    pub d0: f64,
}

/// Jointly simulated companion state (Y_t, H_t, f_t, d_t).
#[derive(Debug, Clone, PartialEq)]
pub struct JointTrace {
    pub y: Vec<f64>,
    pub h: Vec<f64>,
    pub f: Vec<f64>,
    pub d: Vec<f64>,
}

/// One forecaster step: exactly one regime indicator fires for `y_prev`.
#[inline]
pub fn step(space: &RuleSpace, rule: &PredictionRule, y_prev: f64, f_prev: f64) -> f64 {
    let k = space.partition.regime(y_prev);
    rule.alpha0[k] + rule.alpha1[k] * y_prev + rule.beta1[k] * f_prev
}

/// Runs the forecaster and the dominating process along `y`. `y[0]` is the
/// pre-sample observation; the trace has the same length as `y` with
/// `f[0] = f0`, `d[0] = d0`. The initial values must be rule-free; `d0 >= 1`.
pub fn run(space: &RuleSpace, rule: &PredictionRule, y: &[f64], f0: f64, d0: f64) -> Result<ForecastTrace> {
    if y.is_empty() {
        return Err(Error::InvalidArgument("run needs a nonempty path".into()));
    }
    if d0 < 1.0 {
        return Err(Error::InvalidArgument(format!("d0 must be >= 1, got {d0}")));
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("run needs finite inputs".into()));
    }
    let beta_bar = space.beta1_upper;
    let mut f = Vec::with_capacity(y.len());
    let mut d = Vec::with_capacity(y.len());
    f.push(f0);
    d.push(d0);
    for t in 1..y.len() {
        let y_prev = y[t - 1];
        let f_prev = f[t - 1];
        f.push(step(space, rule, y_prev, f_prev));
        d.push(1.0 + y_prev.abs() + f_prev.abs() + beta_bar * d[t - 1]);
    }
    Ok(ForecastTrace { f, d, f0, d0 })
}

/// Simulates the joint companion state `(Y_t, H_t, f_t, d_t)`: the `(f, d)`
/// components coincide bit-exactly with [`run`] applied to the simulated
/// observations.
pub fn companion_state(
    spec: &DgpSpec,
    space: &RuleSpace,
    rule: &PredictionRule,
    t_total: usize,
    seed: u64,
) -> Result<JointTrace> {
    let path = simulate(spec, t_total, seed)?;
    let trace = run(space, rule, &path.y, space.default_f0(), RuleSpace::DEFAULT_D0)?;
    Ok(JointTrace {
        y: path.y,
        h: path.h,
        f: trace.f,
        d: trace.d,
    })
}

/// Breakpoints at the empirical quantiles j/K of a pilot sample, frozen
/// before any empirical risk is computed. Deterministic given the pilot.
pub fn default_partition(pilot: &SimPath, k: usize, r_m: u32) -> Result<Partition> {
    if k == 0 {
        return Err(Error::InvalidArgument("need at least one regime".into()));
    }
    if pilot.len() < 1000 {
        return Err(Error::InvalidArgument(format!(
            "pilot path must have at least 1000 observations, got {}",
            pilot.len()
        )));
    }
    let y_space = if pilot.y.iter().all(|v| *v >= 0.0) {
        YSpace::NonNeg
    } else {
        YSpace::Real
    };
    if k == 1 {
        return Partition::new(y_space, Vec::new(), r_m);
    }
    let mut sorted = pilot.y.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite path"));
    let n = sorted.len();
    let mut breakpoints = Vec::with_capacity(k - 1);
    for j in 1..k {
        // Lower empirical quantile at probability j/k.
        let rank = ((j * n) as f64 / k as f64).ceil() as usize;
        breakpoints.push(sorted[rank.saturating_sub(1)]);
    }
    Partition::new(y_space, breakpoints, r_m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dgp::{preset, PresetParams};
    use crate::seed::rng_for;
    use approx::assert_relative_eq;
    use rand::Rng;

    fn real_space_k1() -> RuleSpace {
        RuleSpace::default_real(Partition::single(YSpace::Real)).unwrap()
    }

    #[test]
    fn step_hand_values() {
        let space = real_space_k1();
        // K=1, theta=(0.1, 0.2, 0.3): 0.1 + 0.2*1 + 0.3*0 = 0.3
        let rule = PredictionRule::new(&space, vec![0.1], vec![0.2], vec![0.3]).unwrap();
        assert_relative_eq!(step(&space, &rule, 1.0, 0.0), 0.3, epsilon = 1e-15);

        // No feedback, zero input: alpha0.
        let rule = PredictionRule::new(&space, vec![0.7], vec![0.4], vec![0.0]).unwrap();
        assert_relative_eq!(step(&space, &rule, 0.0, 123.0), 0.7, epsilon = 1e-15);
    }

    #[test]
    fn step_two_regimes_picks_the_right_cell() {
        let partition = Partition::new(YSpace::Real, vec![1.0], 12).unwrap();
        let space = RuleSpace::new((-2.0, 2.0), (0.01, 1.5), 0.9, partition).unwrap();
        let rule = PredictionRule::new(
            &space,
            vec![0.1, 1.0],
            vec![0.2, 0.5],
            vec![0.3, 0.1],
        )
        .unwrap();
        // y_prev = 2 lands in regime 2: 1.0 + 0.5*2 + 0.1*1 = 2.1
        assert_relative_eq!(step(&space, &rule, 2.0, 1.0), 2.1, epsilon = 1e-15);
        // Breakpoint membership is left-closed: y = 1.0 is regime 2.
        assert_eq!(space.partition.regime(1.0), 1);
        assert_eq!(space.partition.regime(1.0 - 1e-12), 0);
    }

    #[test]
    fn run_hand_recursion() {
        let space = real_space_k1();
        // beta1_bar from the default space is 0.9; build one with 0.3 to
        // match the hand-computed d recursion.
        let space = RuleSpace::new(space.alpha0, space.alpha1, 0.3, space.partition).unwrap();
        let rule = PredictionRule::new(&space, vec![0.1], vec![0.2], vec![0.3]).unwrap();
        let y = vec![1.0, 0.5, 2.0];
        let trace = run(&space, &rule, &y, 0.0, 1.0).unwrap();
        assert_eq!(trace.f.len(), y.len());
        assert_relative_eq!(trace.f[1], 0.3, epsilon = 1e-15);
        assert_relative_eq!(trace.d[1], 1.0 + 1.0 + 0.0 + 0.3, epsilon = 1e-15);
    }

    #[test]
    fn zero_input_dominating_process_is_geometric() {
        let space = real_space_k1();
        let rule = PredictionRule::new(&space, vec![0.0], vec![0.5], vec![0.4]).unwrap();
        let y = vec![0.0; 40];
        let d0 = 3.0;
        let trace = run(&space, &rule, &y, 0.0, d0).unwrap();
        let bb = space.beta1_upper;
        for t in 0..y.len() {
            assert!(trace.f[t].abs() < 1e-15);
            let expected = (1.0 - bb.powi(t as i32)) / (1.0 - bb) + bb.powi(t as i32) * d0;
            assert_relative_eq!(trace.d[t], expected, epsilon = 1e-10);
            assert!(trace.d[t] >= 1.0);
        }
    }

    #[test]
    fn domination_holds_on_simulated_paths() {
        let params = PresetParams {
            rho: Some(0.7),
            ..Default::default()
        };
        let spec = preset("ar1_noise", &params).unwrap();
        let path = crate::dgp::simulate(&spec, 1000, 17).unwrap();
        let space = real_space_k1();
        let (lo, hi) = space.flat_bounds();
        let mut rng = rng_for(55, 0);
        for _ in 0..50 {
            let a: Vec<f64> = lo.iter().zip(&hi).map(|(l, h)| rng.random_range(*l..=*h)).collect();
            let mut b: Vec<f64> = lo.iter().zip(&hi).map(|(l, h)| rng.random_range(*l..=*h)).collect();
            let rule_a = PredictionRule::from_flat(&space, &a).unwrap();
            let mut delta = rule_a.distance_l2(&PredictionRule::from_flat(&space, &b).unwrap());
            if delta > 1.0 {
                // Pull b toward a along the segment (stays in the box).
                let t = rng.random_range(0.0..=1.0) / delta;
                for (bi, ai) in b.iter_mut().zip(&a) {
                    *bi = ai + (*bi - ai) * t;
                }
                delta = PredictionRule::from_flat(&space, &b)
                    .unwrap()
                    .distance_l2(&rule_a);
            }
            let rule_b = PredictionRule::from_flat(&space, &b).unwrap();
            let f0 = space.default_f0();
            let ta = run(&space, &rule_a, &path.y, f0, 1.0).unwrap();
            let tb = run(&space, &rule_b, &path.y, f0, 1.0).unwrap();
            for t in 0..path.y.len() {
                assert!(
                    (ta.f[t] - tb.f[t]).abs() <= delta * tb.d[t] + 1e-12,
                    "domination violated at t={t}: |df|={} delta*d={}",
                    (ta.f[t] - tb.f[t]).abs(),
                    delta * tb.d[t]
                );
            }
        }
    }

    #[test]
    fn traces_contract_in_the_initial_forecast() {
        let space = real_space_k1();
        let rule = PredictionRule::new(&space, vec![0.3], vec![0.4], vec![0.85]).unwrap();
        let params = PresetParams {
            rho: Some(0.5),
            ..Default::default()
        };
        let spec = preset("ar1_noise", &params).unwrap();
        let path = crate::dgp::simulate(&spec, 200, 3).unwrap();
        let fa = run(&space, &rule, &path.y, 0.0, 1.0).unwrap();
        let fb = run(&space, &rule, &path.y, 1.5, 1.0).unwrap();
        let bb = space.beta1_upper;
        for t in 0..path.y.len() {
            let bound = bb.powi(t as i32) * 1.5 + 1e-12;
            assert!(
                (fa.f[t] - fb.f[t]).abs() <= bound,
                "contraction violated at t={t}"
            );
        }
    }

    #[test]
    fn nonneg_forecasts_stay_above_alpha0_lower() {
        let partition = Partition::single(YSpace::NonNeg);
        let space = RuleSpace::default_nonneg(partition).unwrap();
        let rule = PredictionRule::new(&space, vec![0.05], vec![0.1], vec![0.9]).unwrap();
        let params = PresetParams {
            rho: Some(0.9),
            ..Default::default()
        };
        let spec = preset("sv_returns", &params).unwrap();
        let path = crate::dgp::simulate(&spec, 2000, 9).unwrap();
        let trace = run(&space, &rule, &path.y, space.default_f0(), 1.0).unwrap();
        for t in 1..trace.f.len() {
            assert!(trace.f[t] >= space.alpha0.0);
        }
    }

    #[test]
    fn companion_state_is_the_simulate_run_composition() {
        let params = PresetParams {
            rho: Some(0.5),
            ..Default::default()
        };
        let spec = preset("ar1_noise", &params).unwrap();
        let space = real_space_k1();
        let rule = PredictionRule::new(&space, vec![0.0], vec![0.5], vec![0.0]).unwrap();
        let joint = companion_state(&spec, &space, &rule, 300, 21).unwrap();
        let path = crate::dgp::simulate(&spec, 300, 21).unwrap();
        let trace = run(&space, &rule, &path.y, space.default_f0(), 1.0).unwrap();
        assert_eq!(joint.y, path.y);
        assert_eq!(joint.h, path.h);
        assert_eq!(joint.f, trace.f);
        assert_eq!(joint.d, trace.d);
        // theta = (0, 0.5, 0) is the half-previous-observation rule.
        for t in 1..joint.y.len() {
            assert_relative_eq!(joint.f[t], 0.5 * joint.y[t - 1], epsilon = 1e-15);
            assert!(joint.d[t] >= 1.0);
        }
    }

    #[test]
    fn default_partition_quantiles() {
        let mk_pilot = |y: Vec<f64>| SimPath {
            h: vec![0.0; y.len()],
            y,
            seed: 0,
            spec_id: "pilot".into(),
        };
        // k=1: no breakpoints.
        let pilot = mk_pilot((0..1001).map(|i| i as f64 / 1000.0).collect());
        let p = default_partition(&pilot, 1, 6).unwrap();
        assert!(p.breakpoints().is_empty());

        // k=2 on a pilot with empirical median 0.7.
        let mut vals: Vec<f64> = (0..1001).map(|i| 0.7 + (i as f64 - 500.0) / 2000.0).collect();
        // Shuffle deterministically so the quantile works on unsorted data.
        let mut rng = rng_for(1, 1);
        for i in (1..vals.len()).rev() {
            let j = rng.random_range(0..=i);
            vals.swap(i, j);
        }
        let pilot = mk_pilot(vals);
        let p = default_partition(&pilot, 2, 12).unwrap();
        assert_eq!(p.breakpoints().len(), 1);
        assert_relative_eq!(p.breakpoints()[0], 0.7, epsilon = 1e-12);

        // k=5 with r_m=6 violates K < (r_m - 2)/3.
        let pilot = mk_pilot((0..1001).map(|i| i as f64).collect());
        assert!(matches!(
            default_partition(&pilot, 5, 6),
            Err(Error::PartitionTooLarge { .. })
        ));
    }

    #[test]
    fn flat_round_trip_preserves_the_rule() {
        let partition = Partition::new(YSpace::Real, vec![0.4, 1.1], 12).unwrap();
        let space = RuleSpace::new((-1.0, 1.0), (0.05, 1.0), 0.8, partition).unwrap();
        let rule = PredictionRule::new(
            &space,
            vec![0.1, -0.2, 0.3],
            vec![0.5, 0.6, 0.7],
            vec![0.0, 0.4, 0.8],
        )
        .unwrap();
        let back = PredictionRule::from_flat(&space, &rule.as_flat()).unwrap();
        assert_eq!(rule, back);
    }
}
