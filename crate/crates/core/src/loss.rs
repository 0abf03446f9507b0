//! The Bregman loss family.
//!
//! A loss `L(u, v) = psi(u) - psi(v) - grad_psi(v) (u - v)` generated by a
//! strictly convex `psi`. The five implemented generators correspond to the
//! Gaussian, NEF-GHS, gamma (QLIKE), Poisson and negative binomial
//! log-likelihoods. Evaluation uses the algebraically simplified closed
//! forms; the generator route `psi(u) - psi(v) - grad_psi(v)(u - v)` is kept
//! as an independent cross-check in the tests.
//!
//! The gamma "known shape" and negative binomial "known number of failures"
//! are fixed at 1: they rescale the loss by a rule-free positive constant
//! and cannot move an empirical-risk argmin.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dgp::{simulate_with_burnin, DgpSpec, Support, YSpace};
use crate::error::{Error, Result};
use crate::forecaster::{run, RuleSpace};
use crate::seed::derive_seed;

/// `u * ln(u / v)` with the `0 log 0 = 0` convention.
#[inline]
fn xlog_ratio(u: f64, v: f64) -> f64 {
    if u == 0.0 {
        0.0
    } else {
        u * (u / v).ln()
    }
}

/// Loss selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BregmanKind {
    Square,
    NefGhs,
    GammaQlike,
    Poisson,
    NegBin,
}

impl FromStr for BregmanKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "square" => Ok(BregmanKind::Square),
            "nef_ghs" => Ok(BregmanKind::NefGhs),
            "gamma_qlike" => Ok(BregmanKind::GammaQlike),
            "poisson" => Ok(BregmanKind::Poisson),
            "negbin" => Ok(BregmanKind::NegBin),
            other => Err(Error::InvalidArgument(format!("unknown loss `{other}`"))),
        }
    }
}

impl BregmanKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            BregmanKind::Square => "square",
            BregmanKind::NefGhs => "nef_ghs",
            BregmanKind::GammaQlike => "gamma_qlike",
            BregmanKind::Poisson => "poisson",
            BregmanKind::NegBin => "negbin",
        }
    }
}

/// A Bregman loss descriptor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BregmanLoss {
    pub kind: BregmanKind,
}

impl BregmanLoss {
    pub fn new(kind: BregmanKind) -> Self {
        Self { kind }
    }

    /// Human-readable domain of the first argument.
    pub fn domain(&self) -> &'static str {
        match self.kind {
            BregmanKind::Square | BregmanKind::NefGhs => "R",
            BregmanKind::GammaQlike => "(0, inf)",
            BregmanKind::Poisson | BregmanKind::NegBin => "[0, inf)",
        }
    }

    /// Whether `u` lies in the generator domain S.
    #[inline]
    pub fn contains_u(&self, u: f64) -> bool {
        u.is_finite()
            && match self.kind {
                BregmanKind::Square | BregmanKind::NefGhs => true,
                BregmanKind::GammaQlike => u > 0.0,
                BregmanKind::Poisson | BregmanKind::NegBin => u >= 0.0,
            }
    }

    /// Whether `v` lies in the interior of S (forecasts must).
    #[inline]
    pub fn contains_v(&self, v: f64) -> bool {
        v.is_finite()
            && match self.kind {
                BregmanKind::Square | BregmanKind::NefGhs => true,
                BregmanKind::GammaQlike | BregmanKind::Poisson | BregmanKind::NegBin => v > 0.0,
            }
    }

    /// The generator `psi`.
    pub fn psi(&self, u: f64) -> f64 {
        match self.kind {
            BregmanKind::Square => u * u,
            BregmanKind::NefGhs => u * u.atan() - 0.5 * (1.0 + u * u).ln(),
            BregmanKind::GammaQlike => -u.ln(),
            BregmanKind::Poisson => {
                if u == 0.0 {
                    0.0
                } else {
                    u * u.ln() - u
                }
            }
            BregmanKind::NegBin => {
                if u == 0.0 {
                    0.0
                } else {
                    u * (u / (1.0 + u)).ln() - (1.0 + u).ln()
                }
            }
        }
    }

    /// The generator gradient `grad_psi`.
    pub fn grad_psi(&self, v: f64) -> f64 {
        match self.kind {
            BregmanKind::Square => 2.0 * v,
            BregmanKind::NefGhs => v.atan(),
            BregmanKind::GammaQlike => -1.0 / v,
            BregmanKind::Poisson => v.ln(),
            BregmanKind::NegBin => (v / (1.0 + v)).ln(),
        }
    }

    /// The generator curvature `psi''` (exists on the interior of S for
    /// every implemented kind).
    pub fn psi_second(&self, v: f64) -> f64 {
        match self.kind {
            BregmanKind::Square => 2.0,
            BregmanKind::NefGhs => 1.0 / (1.0 + v * v),
            BregmanKind::GammaQlike => 1.0 / (v * v),
            BregmanKind::Poisson => 1.0 / v,
            BregmanKind::NegBin => 1.0 / (v * (1.0 + v)),
        }
    }

    /// Closed-form loss without domain checks; invalid inputs propagate as
    /// NaN. This is the hot path used inside optimizers.
    #[inline]
    pub fn eval_raw(&self, u: f64, v: f64) -> f64 {
        match self.kind {
            BregmanKind::Square => {
                let d = u - v;
                d * d
            }
            BregmanKind::NefGhs => {
                u * (u.atan() - v.atan()) + 0.5 * ((1.0 + v * v) / (1.0 + u * u)).ln()
            }
            BregmanKind::GammaQlike => {
                let r = u / v;
                r - r.ln() - 1.0
            }
            BregmanKind::Poisson => xlog_ratio(u, v) - (u - v),
            BregmanKind::NegBin => xlog_ratio(u, v) + (1.0 + u) * ((1.0 + v) / (1.0 + u)).ln(),
        }
    }

    /// Loss evaluation with domain checking.
    pub fn eval(&self, u: f64, v: f64) -> Result<f64> {
        self.check_domain(u, v)?;
        Ok(self.eval_raw(u, v))
    }

    /// `dL/dv = -psi''(v) (u - v)`.
    pub fn grad_v(&self, u: f64, v: f64) -> Result<f64> {
        self.check_domain(u, v)?;
        Ok(-self.psi_second(v) * (u - v))
    }

    /// Generalized triangle equality: returns `(L(u, w), L(u, v) + L(v, w)
    /// - (u - v)(grad_psi(w) - grad_psi(v)))`; the two sides agree up to
    /// floating point rounding.
    pub fn triangle(&self, u: f64, v: f64, w: f64) -> Result<(f64, f64)> {
        self.check_domain(u, v)?;
        self.check_domain(u, w)?;
        self.check_domain(v, w)?;
        let lhs = self.eval_raw(u, w);
        let rhs = self.eval_raw(u, v) + self.eval_raw(v, w)
            - (u - v) * (self.grad_psi(w) - self.grad_psi(v));
        Ok((lhs, rhs))
    }

    fn check_domain(&self, u: f64, v: f64) -> Result<()> {
        if !self.contains_u(u) {
            return Err(Error::LossDomain {
                arg: "u",
                value: u,
                domain: self.domain(),
            });
        }
        if !self.contains_v(v) {
            return Err(Error::LossDomain {
                arg: "v",
                value: v,
                domain: "int(S)",
            });
        }
        Ok(())
    }

    /// Structural compatibility of the loss with the observation space and
    /// forecast space of a rule class. On the real line only the square and
    /// NEF-GHS losses are admissible.
    pub fn check_pairing(&self, space: &RuleSpace) -> Result<()> {
        match (space.y_space(), self.kind) {
            (YSpace::Real, BregmanKind::Square | BregmanKind::NefGhs) => Ok(()),
            (YSpace::Real, kind) => Err(Error::Pairing(format!(
                "loss {} requires a nonnegative observation space",
                kind.as_str()
            ))),
            (YSpace::NonNeg, _) => Ok(()),
        }
    }

    /// Curvature constant `C_psi` such that `L(v1, v2) <= C_psi (v1 - v2)^2`
    /// over the forecast space, or `None` when the forecast space touches a
    /// curvature singularity. `lower_bound` is the forecast-space lower
    /// bound (`None` for the whole real line).
    pub fn curvature_bound(&self, lower_bound: Option<f64>) -> Option<f64> {
        match self.kind {
            // (u - v)^2 exactly.
            BregmanKind::Square => Some(1.0),
            // sup psi'' = sup 1 / (1 + v^2) = 1.
            BregmanKind::NefGhs => Some(1.0),
            BregmanKind::GammaQlike => match lower_bound {
                Some(lb) if lb > 0.0 => Some(1.0 / (lb * lb)),
                _ => None,
            },
            BregmanKind::Poisson => match lower_bound {
                Some(lb) if lb > 0.0 => Some(1.0 / lb),
                _ => None,
            },
            BregmanKind::NegBin => match lower_bound {
                Some(lb) if lb > 0.0 => Some(1.0 / (lb * (1.0 + lb))),
                _ => None,
            },
        }
    }
}

/// Report from certifying Condition-1-style regularity of a (loss, rule
/// class, process) triple.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Condition1Report {
    pub kind: BregmanKind,
    /// The observation support is contained in the generator domain
    /// (almost surely for continuous positive innovations).
    pub y_support_ok: bool,
    /// Per-seed Monte Carlo estimates of `sup_theta E L(Y, f_theta)^{r_m}`
    /// over the probe-rule grid.
    pub moment_estimates: (f64, f64),
    pub moment_ratio: f64,
    pub moment_finite_ok: bool,
    pub moment_stable_ok: bool,
    /// Certified curvature constant, when the forecast space stays away
    /// from the generator's curvature singularity.
    pub c_psi: Option<f64>,
    pub refusal: Option<String>,
    pub pass: bool,
}

/// Certifies the loss against a rule class and a process: support inclusion,
/// a two-seed Monte Carlo tail check of `sup_theta E L^{r_m}`, and the
/// curvature constant over the forecast space.
pub fn certify_condition1(
    loss: &BregmanLoss,
    space: &RuleSpace,
    spec: &DgpSpec,
    mc_steps: usize,
    seed: u64,
) -> Result<Condition1Report> {
    loss.check_pairing(space)?;
    if mc_steps < 1000 {
        return Err(Error::InvalidArgument("condition-1 check needs >= 1000 steps".into()));
    }

    let y_support_ok = match (spec.y_space, loss.kind) {
        (YSpace::Real, _) => true,
        // On the nonnegative space, a positive-support continuous
        // observation innovation puts Y in (0, inf) almost surely, which
        // covers the strictly positive gamma domain.
        (YSpace::NonNeg, BregmanKind::GammaQlike) => spec.eps_y.support() == Support::PositiveLine,
        (YSpace::NonNeg, _) => true,
    };

    let rules = space.probe_rules();
    let r_m = spec.r_m as i32;
    let mut estimates = [0.0f64; 2];
    for (i, est) in estimates.iter_mut().enumerate() {
        let path = simulate_with_burnin(spec, mc_steps, derive_seed(seed, i as u64))?;
        let mut sup = 0.0f64;
        for rule in &rules {
            let trace = run(space, rule, &path.y, space.default_f0(), RuleSpace::DEFAULT_D0)?;
            let mut acc = 0.0;
            for t in 1..path.y.len() {
                acc += loss.eval_raw(path.y[t], trace.f[t]).powi(r_m);
            }
            let mean = acc / (path.y.len() - 1) as f64;
            if !mean.is_finite() {
                sup = f64::INFINITY;
                break;
            }
            sup = sup.max(mean);
        }
        *est = sup;
    }
    let moment_finite_ok = estimates.iter().all(|e| e.is_finite());
    let moment_ratio = if moment_finite_ok && estimates[1] > 0.0 {
        estimates[0] / estimates[1]
    } else {
        f64::NAN
    };
    // Heavy-tailed powers fluctuate; stability here means the two seeds
    // agree on the order of magnitude.
    let moment_stable_ok = moment_finite_ok && moment_ratio > 0.2 && moment_ratio < 5.0;

    let c_psi = loss.curvature_bound(space.forecast_lower_bound());
    let refusal = if c_psi.is_none() {
        Some(format!(
            "loss {} has unbounded curvature as forecasts approach 0; the forecast space must have a strictly positive lower bound",
            loss.kind.as_str()
        ))
    } else {
        None
    };

    let pass = y_support_ok && moment_finite_ok && moment_stable_ok && c_psi.is_some();
    Ok(Condition1Report {
        kind: loss.kind,
        y_support_ok,
        moment_estimates: (estimates[0], estimates[1]),
        moment_ratio,
        moment_finite_ok,
        moment_stable_ok,
        c_psi,
        refusal,
        pass,
    })
}

pub const ALL_KINDS: [BregmanKind; 5] = [
    BregmanKind::Square,
    BregmanKind::NefGhs,
    BregmanKind::GammaQlike,
    BregmanKind::Poisson,
    BregmanKind::NegBin,
];
