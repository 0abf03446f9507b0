//! Steady-state Kalman predictor for the AR(1) plus noise model.
//!
//! For `H_t = mu + rho (H_{t-1} - mu) + w_t`, `Y_t = H_t + v_t` with
//! `Var(w) = q`, `Var(v) = r`, the one-step predictor variance `P` solves
//! the scalar Riccati fixed point `P = rho^2 P r / (P + r) + q`, i.e. the
//! positive root of `P^2 + (r - rho^2 r - q) P - q r = 0`. With the steady
//! gain `kappa = P / (P + r)`, the predictor recursion
//! `f_{t+1} = mu (1 - rho) + rho kappa Y_t + rho (1 - kappa) f_t`
//! is a member of the single-regime rule class.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Steady-state quantities of the scalar Kalman predictor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SteadyStateKalman {
    /// Steady one-step prediction variance of the hidden state.
    pub prediction_variance: f64,
    /// Steady Kalman gain `P / (P + r)`.
    pub gain: f64,
    /// Predictor coefficients `(alpha0, alpha1, beta1)`.
    pub alpha0: f64,
    pub alpha1: f64,
    pub beta1: f64,
}

/// Closed-form steady state from the positive Riccati root.
pub fn steady_state_kalman(rho: f64, mu_h: f64, q: f64, r: f64) -> Result<SteadyStateKalman> {
    if !(0.0..1.0).contains(&rho) {
        return Err(Error::ParamOutOfRange {
            name: "rho",
            value: rho,
            expected: "[0, 1)",
        });
    }
    if !(q > 0.0) || !(r > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "noise variances must be positive, got q={q}, r={r}"
        )));
    }
    let b = r - rho * rho * r - q;
    let p = 0.5 * (-b + (b * b + 4.0 * q * r).sqrt());
    let gain = p / (p + r);
    Ok(SteadyStateKalman {
        prediction_variance: p,
        gain,
        alpha0: mu_h * (1.0 - rho),
        alpha1: rho * gain,
        beta1: rho * (1.0 - gain),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    /// Independent oracle: iterate the Riccati map to its fixed point.
    fn riccati_fixed_point(rho: f64, q: f64, r: f64) -> f64 {
        let mut p = q;
        for _ in 0..500 {
            p = rho * rho * p * r / (p + r) + q;
        }
        p
    }

    #[test]
    fn closed_form_matches_the_fixed_point_iteration() {
        for &(rho, q, r) in &[(0.5, 1.0, 1.0), (0.9, 1.0, 1.0), (0.5, 1.0, 0.25), (0.0, 2.0, 3.0)] {
            let ss = steady_state_kalman(rho, 0.0, q, r).unwrap();
            let oracle = riccati_fixed_point(rho, q, r);
            assert_relative_eq!(ss.prediction_variance, oracle, epsilon = 1e-12);
        }
    }

    #[test]
    fn frozen_values_for_the_unit_noise_half_persistence_case() {
        // Pre-build oracle values for rho = 0.5, q = r = 1.
        let ss = steady_state_kalman(0.5, 0.0, 1.0, 1.0).unwrap();
        assert_relative_eq!(ss.prediction_variance, 1.132_782_218_537_318_6, epsilon = 1e-14);
        assert_relative_eq!(ss.gain, 0.531_128_874_149_274_8, epsilon = 1e-14);
        assert_relative_eq!(ss.alpha1, 0.265_564_437_074_637_4, epsilon = 1e-14);
        assert_relative_eq!(ss.beta1, 0.234_435_562_925_362_6, epsilon = 1e-14);
        assert_eq!(ss.alpha0, 0.0);
    }
}
