//! Named parametric forms for the chain and observation functions.
//!
//! Restricting the g-functions to these forms keeps the asymptotic growth
//! bounds `(a_h, b_h)` analytic: affine forms have linear slope `|c1|`,
//! constants are `o(|h|)`, and the multiplicative log-AR form grows like
//! `h^rho` with `rho < 1`, which is also `o(|h|)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::YSpace;

/// A scalar function of the hidden state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum GFunc {
    /// `c`
    Constant(f64),
    /// `c0 + c1 * h`
    Affine { c0: f64, c1: f64 },
    /// `c0 + c1 * |h|`
    AffineAbs { c0: f64, c1: f64 },
    /// `exp((1 - rho) * mu) * h^rho` — the log-AR(1) chain written
    /// multiplicatively, valid on the positive half line.
    ExpAr { mu: f64, rho: f64 },
}

impl GFunc {
    pub fn eval(&self, h: f64) -> f64 {
        match *self {
            GFunc::Constant(c) => c,
            GFunc::Affine { c0, c1 } => c0 + c1 * h,
            GFunc::AffineAbs { c0, c1 } => c0 + c1 * h.abs(),
            GFunc::ExpAr { mu, rho } => ((1.0 - rho) * mu).exp() * h.powf(rho),
        }
    }

    /// Asymptotic linear growth slope: the smallest `a` such that
    /// `|g(h)| <= a |h| + o(|h|)`.
    pub fn linear_growth_slope(&self) -> Result<f64> {
        match *self {
            GFunc::Constant(_) => Ok(0.0),
            GFunc::Affine { c1, .. } | GFunc::AffineAbs { c1, .. } => Ok(c1.abs()),
            GFunc::ExpAr { rho, .. } => {
                if rho < 1.0 {
                    Ok(0.0)
                } else {
                    Err(Error::InvalidArgument(format!(
                        "exp-AR form requires rho < 1 for sub-linear growth, got {rho}"
                    )))
                }
            }
        }
    }

    /// Structural positivity over the relevant state range (the whole line
    /// for real-valued series, the positive half line otherwise). Used for
    /// the variance-function roles `g_h2` and `g_y2`; the sampled-grid check
    /// in `validate_assumption1` confirms it numerically.
    pub fn structurally_positive(&self, space: YSpace) -> bool {
        match (*self, space) {
            (GFunc::Constant(c), _) => c > 0.0,
            (GFunc::AffineAbs { c0, c1 }, _) => c0 > 0.0 && c1 >= 0.0,
            (GFunc::Affine { c0, c1 }, YSpace::NonNeg) => {
                c0 >= 0.0 && c1 >= 0.0 && c0 + c1 > 0.0
            }
            (GFunc::Affine { .. }, YSpace::Real) => false,
            (GFunc::ExpAr { .. }, YSpace::NonNeg) => true,
            (GFunc::ExpAr { .. }, YSpace::Real) => false,
        }
    }

    /// Structural nonnegativity over the positive half line (required of
    /// `g_y1` when the series is nonnegative).
    pub fn nonneg_on_positive_axis(&self) -> bool {
        match *self {
            GFunc::Constant(c) => c >= 0.0,
            GFunc::Affine { c0, c1 } | GFunc::AffineAbs { c0, c1 } => c0 >= 0.0 && c1 >= 0.0,
            GFunc::ExpAr { .. } => true,
        }
    }

    pub fn params_finite(&self) -> bool {
        match *self {
            GFunc::Constant(c) => c.is_finite(),
            GFunc::Affine { c0, c1 } | GFunc::AffineAbs { c0, c1 } => {
                c0.is_finite() && c1.is_finite()
            }
            GFunc::ExpAr { mu, rho } => mu.is_finite() && rho.is_finite(),
        }
    }
}
