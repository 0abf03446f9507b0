//! Application presets: AR(1) plus noise, stochastic volatility observed
//! through squared returns, and stochastic volatility observed through a
//! realized-volatility proxy.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::{DgpSpec, GFunc, GrowthBounds, InnovationLaw, YSpace};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PresetName {
    Ar1Noise,
    SvReturns,
    SvRealizedVol,
}

impl FromStr for PresetName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ar1_noise" => Ok(PresetName::Ar1Noise),
            "sv_returns" => Ok(PresetName::SvReturns),
            "sv_realized_vol" => Ok(PresetName::SvRealizedVol),
            other => Err(Error::UnknownPreset(other.to_string())),
        }
    }
}

impl PresetName {
    pub fn as_str(&self) -> &'static str {
        match self {
            PresetName::Ar1Noise => "ar1_noise",
            PresetName::SvReturns => "sv_returns",
            PresetName::SvRealizedVol => "sv_realized_vol",
        }
    }
}

/// Key-value parameters for a preset. Keys that a preset does not use must
/// be left unset; setting them is an error so config typos cannot silently
/// change a study.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct PresetParams {
    /// Chain persistence. Required by every preset.
    pub rho: Option<f64>,
    /// Long-run mean of the (log-)chain. `ar1_noise`, `sv_returns`.
    pub mu_h: Option<f64>,
    /// Hidden-chain innovation scale: stddev of `eps_H` for `ar1_noise`,
    /// stddev of the log-volatility shock for `sv_returns`, scale of the
    /// chain's gamma shock for `sv_realized_vol`.
    pub sigma_h: Option<f64>,
    /// Observation noise stddev. `ar1_noise` only.
    pub sigma_y: Option<f64>,
    /// Gamma shape of the unit-mean measurement error. `sv_realized_vol`.
    pub shape_y: Option<f64>,
    /// Gamma shape of the unit-mean chain shock. `sv_realized_vol`.
    pub shape_h: Option<f64>,
    /// Chain intercept. `sv_realized_vol`.
    pub omega: Option<f64>,
    pub r_m: Option<u32>,
    pub burn_in: Option<usize>,
}

fn require(value: Option<f64>, name: &'static str, preset: &str) -> Result<f64> {
    value.ok_or_else(|| Error::InvalidArgument(format!("preset {preset} requires parameter `{name}`")))
}

fn forbid(value: Option<f64>, name: &'static str, preset: &str) -> Result<()> {
    if value.is_some() {
        return Err(Error::InvalidArgument(format!(
            "parameter `{name}` is not used by preset {preset}"
        )));
    }
    Ok(())
}

fn check_range(ok: bool, name: &'static str, value: f64, expected: &'static str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::ParamOutOfRange { name, value, expected })
    }
}

/// Fills a preset's documented defaults into the parameter map, leaving
/// keys the preset does not use unset. The result is a fixed point:
/// resolving twice changes nothing.
pub fn resolve_params(name: &str, params: &PresetParams) -> Result<PresetParams> {
    let parsed: PresetName = name.parse()?;
    let mut out = *params;
    out.r_m = Some(params.r_m.unwrap_or(6));
    out.burn_in = Some(params.burn_in.unwrap_or(1000));
    match parsed {
        PresetName::Ar1Noise => {
            out.mu_h = Some(params.mu_h.unwrap_or(0.0));
            out.sigma_h = Some(params.sigma_h.unwrap_or(1.0));
            out.sigma_y = Some(params.sigma_y.unwrap_or(1.0));
        }
        PresetName::SvReturns => {
            out.mu_h = Some(params.mu_h.unwrap_or(0.0));
            out.sigma_h = Some(params.sigma_h.unwrap_or(0.3));
        }
        PresetName::SvRealizedVol => {
            out.rho = Some(params.rho.unwrap_or(0.9));
            out.omega = Some(params.omega.unwrap_or(0.05));
            out.sigma_h = Some(params.sigma_h.unwrap_or(0.1));
            out.shape_h = Some(params.shape_h.unwrap_or(4.0));
            out.shape_y = Some(params.shape_y.unwrap_or(5.0));
        }
    }
    Ok(out)
}

/// Builds the specification for a named application preset.
pub fn preset(name: &str, params: &PresetParams) -> Result<DgpSpec> {
    let name: PresetName = name.parse()?;
    let r_m = params.r_m.unwrap_or(6);
    let burn_in = params.burn_in.unwrap_or(1000);
    match name {
        PresetName::Ar1Noise => {
            forbid(params.shape_y, "shape_y", "ar1_noise")?;
            forbid(params.shape_h, "shape_h", "ar1_noise")?;
            forbid(params.omega, "omega", "ar1_noise")?;
            let rho = require(params.rho, "rho", "ar1_noise")?;
            check_range((0.0..1.0).contains(&rho), "rho", rho, "[0, 1)")?;
            let mu_h = params.mu_h.unwrap_or(0.0);
            let sigma_h = params.sigma_h.unwrap_or(1.0);
            let sigma_y = params.sigma_y.unwrap_or(1.0);
            check_range(sigma_h >= 0.0, "sigma_h", sigma_h, ">= 0")?;
            check_range(sigma_y >= 0.0, "sigma_y", sigma_y, ">= 0")?;
            let id = format!(
                "ar1_noise(rho={rho},mu_h={mu_h},sigma_h={sigma_h},sigma_y={sigma_y},r_m={r_m})"
            );
            DgpSpec::new(
                YSpace::Real,
                GFunc::Affine { c0: mu_h * (1.0 - rho), c1: rho },
                GFunc::Constant(1.0),
                GFunc::Affine { c0: 0.0, c1: 1.0 },
                GFunc::Constant(1.0),
                InnovationLaw::gaussian(0.0, sigma_h)?,
                InnovationLaw::gaussian(0.0, sigma_y)?,
                mu_h,
                mu_h,
                r_m,
                GrowthBounds { a_h: rho, b_h: 0.0 },
                burn_in,
                id,
            )
        }
        PresetName::SvReturns => {
            forbid(params.sigma_y, "sigma_y", "sv_returns")?;
            forbid(params.shape_y, "shape_y", "sv_returns")?;
            forbid(params.shape_h, "shape_h", "sv_returns")?;
            forbid(params.omega, "omega", "sv_returns")?;
            let rho = require(params.rho, "rho", "sv_returns")?;
            check_range(rho > 0.0 && rho < 1.0, "rho", rho, "(0, 1)")?;
            let mu_h = params.mu_h.unwrap_or(0.0);
            let sigma_eta = params.sigma_h.unwrap_or(0.3);
            check_range(sigma_eta >= 0.0, "sigma_h", sigma_eta, ">= 0")?;
            // Long-run mean of sigma^2 under the stationary log-normal law.
            let log_var = sigma_eta * sigma_eta / (1.0 - rho * rho);
            let h0 = (mu_h + 0.5 * log_var).exp();
            let id = format!("sv_returns(rho={rho},mu_h={mu_h},sigma_eta={sigma_eta},r_m={r_m})");
            DgpSpec::new(
                YSpace::NonNeg,
                GFunc::Constant(0.0),
                GFunc::ExpAr { mu: mu_h, rho },
                GFunc::Constant(0.0),
                GFunc::Affine { c0: 0.0, c1: 1.0 },
                InnovationLaw::lognormal(0.0, sigma_eta)?,
                InnovationLaw::chisq1(),
                h0,
                0.0,
                r_m,
                GrowthBounds { a_h: rho, b_h: 0.0 },
                burn_in,
                id,
            )
        }
        PresetName::SvRealizedVol => {
            forbid(params.mu_h, "mu_h", "sv_realized_vol")?;
            forbid(params.sigma_y, "sigma_y", "sv_realized_vol")?;
            let rho = params.rho.unwrap_or(0.9);
            check_range((0.0..1.0).contains(&rho), "rho", rho, "[0, 1)")?;
            let omega = params.omega.unwrap_or(0.05);
            check_range(omega > 0.0, "omega", omega, "> 0")?;
            let sigma_h = params.sigma_h.unwrap_or(0.1);
            check_range(sigma_h > 0.0, "sigma_h", sigma_h, "> 0")?;
            let shape_h = params.shape_h.unwrap_or(4.0);
            check_range(shape_h > 0.0, "shape_h", shape_h, "> 0")?;
            let shape_y = params.shape_y.unwrap_or(5.0);
            check_range(shape_y > 0.0, "shape_y", shape_y, "> 0")?;
            // Both gamma shocks are unit mean: the chain shock so the
            // long-run level is (omega + sigma_h)/(1 - rho), the measurement
            // error so RV_t is a conditionally unbiased volatility proxy.
            let h0 = (omega + sigma_h) / (1.0 - rho);
            let id = format!(
                "sv_realized_vol(rho={rho},omega={omega},sigma_h={sigma_h},shape_h={shape_h},shape_y={shape_y},r_m={r_m})"
            );
            DgpSpec::new(
                YSpace::NonNeg,
                GFunc::Affine { c0: omega, c1: rho },
                GFunc::Constant(sigma_h),
                GFunc::Constant(0.0),
                GFunc::Affine { c0: 0.0, c1: 1.0 },
                InnovationLaw::gamma(shape_h, 1.0 / shape_h, true)?,
                InnovationLaw::gamma(shape_y, 1.0 / shape_y, true)?,
                h0,
                0.0,
                r_m,
                GrowthBounds { a_h: rho, b_h: 0.0 },
                burn_in,
                id,
            )
        }
    }
}
