//! The recursive forecaster as the exact solution of a sequential
//! tracking-error minimization.
//!
//! At each step the tracking error
//! `Q_t(f) = w1 L(f_bar, f) + w2 L(y_{t-1}, f) + w3 L(f_{t-1}, f)`
//! is minimized over forecasts. For any Bregman loss the minimizer is the
//! weighted mean `w1 f_bar + w2 y_{t-1} + w3 f_{t-1}`, independent of the
//! generator. With `f_0 = f_bar`, the same objective can be re-summed as an
//! exponential-kernel local-constant regression over the whole history plus
//! a penalty toward `f_bar`; the two forms differ only by a forecast-free
//! additive constant.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::loss::{BregmanKind, BregmanLoss};

use super::stats;

/// A point in the 3-simplex weighting the tracking-error terms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrackingWeights {
    pub w1: f64,
    pub w2: f64,
    pub w3: f64,
}

impl TrackingWeights {
    pub fn new(w1: f64, w2: f64, w3: f64) -> Result<Self> {
        if w1 < 0.0 || w2 < 0.0 || w3 < 0.0 {
            return Err(Error::InvalidArgument("weights must be nonnegative".into()));
        }
        if ((w1 + w2 + w3) - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "weights must sum to 1 within 1e-12, got {}",
                w1 + w2 + w3
            )));
        }
        Ok(Self { w1, w2, w3 })
    }
}

/// Result of the closed-form vs numeric-argmin comparison.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrackingCheck {
    pub weights: TrackingWeights,
    pub f_bar: f64,
    pub steps: usize,
    /// `max_t |closed_form_t - numeric_argmin_t|`.
    pub max_residual: f64,
    /// Variance over a forecast grid of (scaled kernel-form Q minus
    /// recursive-form Q); `None` when `w2 = 0` makes the kernel
    /// normalization undefined.
    pub kernel_variance: Option<f64>,
}

/// Golden-section minimization of a unimodal scalar function on `[lo, hi]`.
fn golden_min<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64> {
    if !(lo < hi) {
        return Err(Error::BracketFailure(format!("empty bracket [{lo}, {hi}]")));
    }
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    if !f1.is_finite() || !f2.is_finite() {
        return Err(Error::BracketFailure("objective not finite inside the bracket".into()));
    }
    for _ in 0..200 {
        if hi - lo < tol {
            break;
        }
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Verifies, along a path prefix, that the numeric minimizer of the
/// tracking error matches the closed form `w1 f_bar + w2 y_{t-1} + w3
/// f_{t-1}`, and that the kernel re-summation of the objective agrees with
/// the recursive form up to a forecast-free constant. The recursion starts
/// at `f_0 = f_bar` (required by the kernel identity).
pub fn check_tracking_equivalence(
    loss: &BregmanLoss,
    weights: TrackingWeights,
    f_bar: f64,
    y: &[f64],
) -> Result<TrackingCheck> {
    match loss.kind {
        BregmanKind::Square | BregmanKind::GammaQlike => {}
        other => {
            return Err(Error::Pairing(format!(
                "tracking equivalence is checked for square and gamma_qlike, got {}",
                other.as_str()
            )))
        }
    }
    if y.is_empty() {
        return Err(Error::InvalidArgument("need a nonempty path prefix".into()));
    }
    if loss.kind == BregmanKind::GammaQlike {
        if !(f_bar > 0.0) {
            return Err(Error::InvalidArgument("gamma_qlike needs f_bar > 0".into()));
        }
        if y.iter().any(|v| !(*v > 0.0)) {
            return Err(Error::InvalidArgument("gamma_qlike needs positive observations".into()));
        }
    }

    let q_t = |atoms: [f64; 3], f: f64| -> f64 {
        let mut acc = 0.0;
        for (w, u) in [weights.w1, weights.w2, weights.w3].iter().zip(atoms) {
            if *w > 0.0 {
                acc += w * loss.eval_raw(u, f);
            }
        }
        acc
    };

    let mut f_prev = f_bar;
    let mut closed_path = Vec::with_capacity(y.len());
    let mut max_residual = 0.0f64;
    for t in 1..=y.len() {
        let atoms = [f_bar, y[t - 1], f_prev];
        let closed = weights.w1 * f_bar + weights.w2 * y[t - 1] + weights.w3 * f_prev;
        let (mut lo, mut hi) = atoms
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &a| (lo.min(a), hi.max(a)));
        // The minimizer is the weighted mean, inside the atom hull; widen
        // the bracket so the hull boundary is interior.
        if loss.kind == BregmanKind::GammaQlike {
            lo *= 0.5;
            hi = 2.0 * hi + 1.0;
        } else {
            lo -= 1.0;
            hi += 1.0;
        }
        let numeric = golden_min(|f| q_t(atoms, f), lo, hi, 1e-9)?;
        max_residual = max_residual.max((closed - numeric).abs());
        closed_path.push(closed);
        f_prev = closed;
    }

    // Kernel re-summation at the final step: with x_t = t and
    // k(u) = exp(u) 1{u <= 0}, the kernel weight of L(Y_{t-i-1}, f) is
    // w3^i, and the penalty weight is lambda = 1/w2 - sum_{i=1..t} w3^{i-1}.
    // Scaling the kernel objective by w2 matches the recursive form up to a
    // constant in f.
    let kernel_variance = if weights.w2 > 0.0 {
        let t = y.len();
        let lambda = {
            let mut geom = 0.0;
            let mut pw = 1.0;
            for _ in 1..=t {
                geom += pw;
                pw *= weights.w3;
            }
            1.0 / weights.w2 - geom
        };
        let kernel_q = |f: f64| -> f64 {
            let mut acc = 0.0;
            let mut pw = 1.0;
            for i in 0..t {
                acc += pw * loss.eval_raw(y[t - 1 - i], f);
                pw *= weights.w3;
            }
            acc + lambda * loss.eval_raw(f_bar, f)
        };
        let f_prev_final = if t >= 2 { closed_path[t - 2] } else { f_bar };
        let recursive_q = |f: f64| q_t([f_bar, y[t - 1], f_prev_final], f);
        // Evaluate the difference over a forecast grid.
        let (mut glo, mut ghi) = y
            .iter()
            .chain(std::iter::once(&f_bar))
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
        if loss.kind == BregmanKind::GammaQlike {
            glo *= 0.5;
            ghi *= 1.5;
        } else {
            glo -= 1.0;
            ghi += 1.0;
        }
        let diffs: Vec<f64> = (0..=20)
            .map(|i| {
                let f = glo + (ghi - glo) * i as f64 / 20.0;
                weights.w2 * kernel_q(f) - recursive_q(f)
            })
            .collect();
        Some(stats::variance(&diffs))
    } else {
        None
    };

    Ok(TrackingCheck {
        weights,
        f_bar,
        steps: y.len(),
        max_residual,
        kernel_variance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dgp::{preset, simulate_with_burnin, PresetParams};
    use approx::assert_relative_eq;

    #[test]
    fn hand_example_first_step() {
        // w = (0.2, 0.3, 0.5), f_bar = 1, y0 = 2, f0 = f_bar = 1:
        // f1 = 0.2 + 0.6 + 0.5 = 1.3.
        let w = TrackingWeights::new(0.2, 0.3, 0.5).unwrap();
        let loss = BregmanLoss::new(BregmanKind::Square);
        let check = check_tracking_equivalence(&loss, w, 1.0, &[2.0]).unwrap();
        assert!(check.max_residual < 1e-6);
        // Independent numeric check of the first closed-form value.
        let f1 = 0.2 * 1.0 + 0.3 * 2.0 + 0.5 * 1.0;
        assert_relative_eq!(f1, 1.3, epsilon = 1e-15);
    }

    #[test]
    fn degenerate_weights_pin_the_forecast_to_f_bar() {
        let w = TrackingWeights::new(1.0, 0.0, 0.0).unwrap();
        let loss = BregmanLoss::new(BregmanKind::Square);
        let check = check_tracking_equivalence(&loss, w, 0.7, &[5.0, -3.0, 2.0]).unwrap();
        // Closed form stays at f_bar; the numeric argmin must agree.
        assert!(check.max_residual < 1e-6);
        assert!(check.kernel_variance.is_none());
    }

    #[test]
    fn closed_form_is_loss_free_for_qlike_too() {
        let params = PresetParams { rho: Some(0.9), ..Default::default() };
        let spec = preset("sv_returns", &params).unwrap();
        let path = simulate_with_burnin(&spec, 200, 4).unwrap();
        let w = TrackingWeights::new(0.2, 0.3, 0.5).unwrap();
        let loss = BregmanLoss::new(BregmanKind::GammaQlike);
        let check = check_tracking_equivalence(&loss, w, 1.0, &path.y[1..]).unwrap();
        assert!(check.max_residual < 1e-6, "residual {}", check.max_residual);
        assert!(check.kernel_variance.unwrap() < 1e-10);
    }

    #[test]
    fn weights_must_lie_in_the_simplex() {
        assert!(TrackingWeights::new(0.5, 0.5, 0.1).is_err());
        assert!(TrackingWeights::new(-0.1, 0.6, 0.5).is_err());
    }
}
