//! Parameter-driven data generating processes.
//!
//! A process is a hidden chain `H_t = g_h1(H_{t-1}) + g_h2(H_{t-1}) eps_H,t`
//! observed through `Y_t = g_y1(H_t) + g_y2(H_t) eps_Y,t`. Specifications
//! are immutable after construction and safe to share across threads; one
//! path is simulated sequentially, many paths derive independent RNG streams
//! from `(master_seed, path_index)` (see [`crate::seed`]).

mod gfunc;
mod law;
mod preset;
mod validate;

pub use gfunc::GFunc;
pub use law::{InnovationFamily, InnovationLaw, Sampler, Support};
pub use preset::{preset, resolve_params, PresetName, PresetParams};
pub use validate::{validate_assumption1, PositivityCheck, StabilityCheck, ValidationReport};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed::rng_from;

/// Whether the observed series lives on the whole line or the nonnegative
/// half line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum YSpace {
    Real,
    NonNeg,
}

/// Asymptotic growth certificate for the hidden chain: `|g_h1(h)| <= a_h|h| + o(|h|)`
/// and `|g_h2(h)| <= b_h|h| + o(|h|)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthBounds {
    pub a_h: f64,
    pub b_h: f64,
}

/// A parameter-driven process specification.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DgpSpec {
    pub y_space: YSpace,
    pub g_h1: GFunc,
    pub g_h2: GFunc,
    pub g_y1: GFunc,
    pub g_y2: GFunc,
    pub eps_h: InnovationLaw,
    pub eps_y: InnovationLaw,
    pub h0: f64,
    pub y0: f64,
    /// Moment order parameter; innovations need finite moments up to `2 r_m`.
    pub r_m: u32,
    pub growth: GrowthBounds,
    /// Steps discarded before a retained sample (see [`simulate_with_burnin`]).
    pub burn_in: usize,
    pub id: String,
}

impl DgpSpec {
    /// Builds a specification, checking the structural invariants that are
    /// analytic for the named g-function forms. The Monte Carlo stability
    /// certificate is a separate step ([`validate_assumption1`]).
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        y_space: YSpace,
        g_h1: GFunc,
        g_h2: GFunc,
        g_y1: GFunc,
        g_y2: GFunc,
        eps_h: InnovationLaw,
        eps_y: InnovationLaw,
        h0: f64,
        y0: f64,
        r_m: u32,
        growth: GrowthBounds,
        burn_in: usize,
        id: impl Into<String>,
    ) -> Result<Self> {
        if r_m < 6 {
            return Err(Error::InvalidArgument(format!("r_m must be >= 6, got {r_m}")));
        }
        for (name, g) in [("g_h1", g_h1), ("g_h2", g_h2), ("g_y1", g_y1), ("g_y2", g_y2)] {
            if !g.params_finite() {
                return Err(Error::InvalidArgument(format!("{name} has non-finite parameters")));
            }
        }
        if !h0.is_finite() || !y0.is_finite() {
            return Err(Error::InvalidArgument("initial values must be finite".into()));
        }
        if !(growth.a_h >= 0.0) || !(growth.b_h >= 0.0) {
            return Err(Error::InvalidArgument("growth bounds must be nonnegative".into()));
        }
        // The declared (a_h, b_h) must dominate the analytic slopes of the
        // chosen forms.
        let a_slope = g_h1.linear_growth_slope()?;
        let b_slope = g_h2.linear_growth_slope()?;
        if growth.a_h < a_slope || growth.b_h < b_slope {
            return Err(Error::InvalidArgument(format!(
                "growth bounds (a_h={}, b_h={}) below analytic slopes ({a_slope}, {b_slope})",
                growth.a_h, growth.b_h
            )));
        }
        if !g_h2.structurally_positive(chain_space(y_space)) {
            return Err(Error::InvalidArgument(
                "g_h2 must be strictly positive over the chain range".into(),
            ));
        }
        if !g_y2.structurally_positive(chain_space(y_space)) {
            return Err(Error::InvalidArgument(
                "g_y2 must be strictly positive over the chain range".into(),
            ));
        }
        if y_space == YSpace::NonNeg {
            if eps_y.support() != Support::PositiveLine {
                return Err(Error::InvalidArgument(
                    "nonnegative series requires a positive-support observation innovation".into(),
                ));
            }
            if !g_y1.nonneg_on_positive_axis() {
                return Err(Error::InvalidArgument(
                    "nonnegative series requires g_y1 >= 0 on the chain range".into(),
                ));
            }
            if !(h0 > 0.0) {
                return Err(Error::InvalidArgument(
                    "nonnegative series requires h0 > 0 (chain lives in the interior)".into(),
                ));
            }
            if y0 < 0.0 {
                return Err(Error::InvalidArgument("nonnegative series requires y0 >= 0".into()));
            }
        }
        Ok(Self {
            y_space,
            g_h1,
            g_h2,
            g_y1,
            g_y2,
            eps_h,
            eps_y,
            h0,
            y0,
            r_m,
            growth,
            burn_in,
            id: id.into(),
        })
    }
}

/// The hidden chain lives in the interior of the observation space.
fn chain_space(y_space: YSpace) -> YSpace {
    y_space
}

/// A simulated joint path of `(Y_t, H_t)`. Index 0 carries the initial
/// values; indices `1..` are the simulated recursion.
#[derive(Debug, Clone, PartialEq)]
pub struct SimPath {
    pub y: Vec<f64>,
    pub h: Vec<f64>,
    pub seed: u64,
    pub spec_id: String,
}

impl SimPath {
    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    /// Number of observations after the initial value.
    pub fn steps(&self) -> usize {
        self.y.len().saturating_sub(1)
    }

    /// The sub-path covering indices `start..start + len` (initial value of
    /// the slice is its first element).
    pub fn segment(&self, start: usize, len: usize) -> Result<SimPath> {
        if start + len > self.y.len() {
            return Err(Error::LengthMismatch(format!(
                "segment {start}..{} out of bounds for path of length {}",
                start + len,
                self.y.len()
            )));
        }
        Ok(SimPath {
            y: self.y[start..start + len].to_vec(),
            h: self.h[start..start + len].to_vec(),
            seed: self.seed,
            spec_id: self.spec_id.clone(),
        })
    }
}

/// Advances the chain one step and draws the matching observation.
/// Draw order per step is fixed: `eps_H` first, then `eps_Y`.
#[inline]
fn advance<R: rand::Rng + ?Sized>(
    spec: &DgpSpec,
    h_prev: f64,
    eps_h: &Sampler,
    eps_y: &Sampler,
    rng: &mut R,
) -> (f64, f64) {
    let h = spec.g_h1.eval(h_prev) + spec.g_h2.eval(h_prev) * eps_h.sample(rng);
    let y = spec.g_y1.eval(h) + spec.g_y2.eval(h) * eps_y.sample(rng);
    (h, y)
}

/// Simulates a path of total length `t_total` (initial values at index 0,
/// `t_total - 1` recursion steps). Bit-reproducible for a fixed
/// `(spec, t_total, seed)`.
pub fn simulate(spec: &DgpSpec, t_total: usize, seed: u64) -> Result<SimPath> {
    if t_total == 0 {
        return Err(Error::InvalidArgument("t_total must be positive".into()));
    }
    let mut rng = rng_from(seed);
    let eps_h = spec.eps_h.sampler();
    let eps_y = spec.eps_y.sampler();
    let mut y = Vec::with_capacity(t_total);
    let mut h = Vec::with_capacity(t_total);
    y.push(spec.y0);
    h.push(spec.h0);
    let mut h_prev = spec.h0;
    for t in 1..t_total {
        let (ht, yt) = advance(spec, h_prev, &eps_h, &eps_y, &mut rng);
        if !ht.is_finite() || !yt.is_finite() {
            return Err(Error::SimulationDiverged { t, h: ht, y: yt });
        }
        if spec.y_space == YSpace::NonNeg && yt < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "nonnegative series produced y={yt} at t={t}; spec violates its own invariants"
            )));
        }
        h.push(ht);
        y.push(yt);
        h_prev = ht;
    }
    Ok(SimPath {
        y,
        h,
        seed,
        spec_id: spec.id.clone(),
    })
}

/// Continues the chain for `steps` steps from the state `h_start`, using the
/// supplied RNG. Returns `(y, h)` of length `steps` (the start state is not
/// included). The chain is Markov: the continuation depends on the past only
/// through `h_start`.
pub fn simulate_from<R: rand::Rng + ?Sized>(
    spec: &DgpSpec,
    h_start: f64,
    steps: usize,
    rng: &mut R,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let eps_h = spec.eps_h.sampler();
    let eps_y = spec.eps_y.sampler();
    let mut y = Vec::with_capacity(steps);
    let mut h = Vec::with_capacity(steps);
    let mut h_prev = h_start;
    for t in 1..=steps {
        let (ht, yt) = advance(spec, h_prev, &eps_h, &eps_y, rng);
        if !ht.is_finite() || !yt.is_finite() {
            return Err(Error::SimulationDiverged { t, h: ht, y: yt });
        }
        h.push(ht);
        y.push(yt);
        h_prev = ht;
    }
    Ok((y, h))
}

/// Simulates `spec.burn_in` steps from the configured initial values,
/// discards them, and returns a path of length `t_keep + 1` whose index 0 is
/// the last burn-in state. This approximates a draw from the stationary law
/// while preserving the pre-sample-observation convention for index 0.
pub fn simulate_with_burnin(spec: &DgpSpec, t_keep: usize, seed: u64) -> Result<SimPath> {
    let total = spec.burn_in + t_keep + 1;
    let full = simulate(spec, total, seed)?;
    full.segment(spec.burn_in, t_keep + 1)
}
