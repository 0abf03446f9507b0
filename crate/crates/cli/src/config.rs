//! Strict TOML configuration.
//!
//! Unknown keys are rejected everywhere: a typo must fail the run, not
//! silently change a study. Resolution fills every default in place, and the
//! resolved config is echoed into each output artifact; re-parsing the echo
//! yields the identical resolved config, so outputs are a pure function of
//! the config bytes.

use serde::{Deserialize, Serialize};

use erm_forecast::dgp::{self, DgpSpec, PresetParams, YSpace};
use erm_forecast::erm::OptConfig;
use erm_forecast::forecaster::{default_partition, Partition, PredictionRule, RuleSpace};
use erm_forecast::loss::{BregmanKind, BregmanLoss};
use erm_forecast::seed::derive_seed;

pub type CliResult<T> = Result<T, String>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub master_seed: Option<u64>,
    pub dgp: Option<DgpSection>,
    pub rule: Option<RuleSection>,
    pub erm: Option<ErmSection>,
    pub study: Option<StudySection>,
    pub output: Option<OutputSection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DgpSection {
    pub preset: String,
    pub rho: Option<f64>,
    pub mu_h: Option<f64>,
    pub sigma_h: Option<f64>,
    pub sigma_y: Option<f64>,
    pub shape_y: Option<f64>,
    pub shape_h: Option<f64>,
    pub omega: Option<f64>,
    pub r_m: Option<u32>,
    pub burn_in: Option<usize>,
    pub t_total: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct RuleSection {
    pub k: Option<usize>,
    pub alpha0_min: Option<f64>,
    pub alpha0_max: Option<f64>,
    pub alpha1_min: Option<f64>,
    pub alpha1_max: Option<f64>,
    pub beta1_max: Option<f64>,
    /// Explicit partition breakpoints; derived from a pilot path when
    /// absent and `k > 1`.
    pub breakpoints: Option<Vec<f64>>,
    pub pilot_len: Option<usize>,
    /// Concrete rule coefficients (used by `diagnose`).
    pub alpha0: Option<Vec<f64>>,
    pub alpha1: Option<Vec<f64>>,
    pub beta1: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ErmSection {
    pub loss: String,
    pub starts: Option<usize>,
    pub grid_points: Option<usize>,
    pub n_mc: Option<usize>,
    pub gamma: Option<f64>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct StudySection {
    pub t_grid: Option<Vec<usize>>,
    pub replications: Option<usize>,
    pub excess_grid: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub dir: Option<String>,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> CliResult<Self> {
        toml::from_str(text).map_err(|e| format!("config parse error: {e}").replace('\n', " "))
    }
}

/// A fully resolved run: the echoed config plus the typed pieces commands
/// work with.
pub struct Resolved {
    pub echo: RunConfig,
    pub master_seed: u64,
    pub out_dir: String,
}

impl Resolved {
    /// Applies the CLI flag overrides and materializes the defaults that do
    /// not require a section to be present.
    pub fn new(mut config: RunConfig, seed_override: Option<u64>, out_override: Option<String>) -> Self {
        if let Some(seed) = seed_override {
            config.master_seed = Some(seed);
        }
        let master_seed = *config.master_seed.get_or_insert(0);
        let output = config.output.get_or_insert_with(OutputSection::default);
        if let Some(dir) = out_override {
            output.dir = Some(dir);
        }
        let out_dir = output.dir.get_or_insert_with(|| "out".to_string()).clone();
        Self {
            echo: config,
            master_seed,
            out_dir,
        }
    }

    fn dgp_mut(&mut self) -> CliResult<&mut DgpSection> {
        self.echo.dgp.as_mut().ok_or_else(|| "missing required section `dgp`".to_string())
    }

    /// Builds the process spec, materializing preset defaults into the echo.
    pub fn build_spec(&mut self) -> CliResult<DgpSpec> {
        let section = self.dgp_mut()?;
        let params = PresetParams {
            rho: section.rho,
            mu_h: section.mu_h,
            sigma_h: section.sigma_h,
            sigma_y: section.sigma_y,
            shape_y: section.shape_y,
            shape_h: section.shape_h,
            omega: section.omega,
            r_m: section.r_m,
            burn_in: section.burn_in,
        };
        let params = dgp::resolve_params(&section.preset, &params).map_err(|e| format!("{e}"))?;
        let spec = dgp::preset(&section.preset, &params).map_err(|e| format!("{e}"))?;
        section.rho = params.rho;
        section.mu_h = params.mu_h;
        section.sigma_h = params.sigma_h;
        section.sigma_y = params.sigma_y;
        section.shape_y = params.shape_y;
        section.shape_h = params.shape_h;
        section.omega = params.omega;
        section.r_m = params.r_m;
        section.burn_in = params.burn_in;
        Ok(spec)
    }

    pub fn t_total(&self) -> CliResult<usize> {
        self.echo
            .dgp
            .as_ref()
            .and_then(|d| d.t_total)
            .ok_or_else(|| "missing required key `t_total` in [dgp]".to_string())
    }

    /// Builds the rule space over the spec's observation space,
    /// materializing the resolved bounds and breakpoints into the echo.
    pub fn build_space(&mut self, spec: &DgpSpec) -> CliResult<RuleSpace> {
        let master_seed = self.master_seed;
        if self.echo.rule.is_none() {
            self.echo.rule = Some(RuleSection::default());
        }

        // Defaults depend on the observation space.
        let defaults = match spec.y_space {
            YSpace::Real => ((-2.0, 2.0), (0.01, 1.5), 0.9),
            YSpace::NonNeg => ((0.005, 2.0), (0.01, 1.5), 0.95),
        };
        let section = self.echo.rule.as_mut().expect("inserted above");
        let k = *section.k.get_or_insert(1);
        let alpha0 = (
            *section.alpha0_min.get_or_insert(defaults.0 .0),
            *section.alpha0_max.get_or_insert(defaults.0 .1),
        );
        let alpha1 = (
            *section.alpha1_min.get_or_insert(defaults.1 .0),
            *section.alpha1_max.get_or_insert(defaults.1 .1),
        );
        let beta1_max = *section.beta1_max.get_or_insert(defaults.2);
        let pilot_len = *section.pilot_len.get_or_insert(5000);

        let partition = if let Some(bp) = &section.breakpoints {
            if bp.len() + 1 != k {
                return Err(format!(
                    "breakpoints count {} inconsistent with k = {k}",
                    bp.len()
                ));
            }
            Partition::new(spec.y_space, bp.clone(), spec.r_m).map_err(|e| format!("{e}"))?
        } else if k == 1 {
            let p = Partition::single(spec.y_space);
            section.breakpoints = Some(Vec::new());
            p
        } else {
            let pilot = dgp::simulate_with_burnin(spec, pilot_len, derive_seed(master_seed, 7))
                .map_err(|e| format!("{e}"))?;
            let p = default_partition(&pilot, k, spec.r_m).map_err(|e| format!("{e}"))?;
            section.breakpoints = Some(p.breakpoints().to_vec());
            p
        };

        RuleSpace::new(alpha0, alpha1, beta1_max, partition).map_err(|e| format!("{e}"))
    }

    /// The concrete rule named in `[rule]` (for `diagnose`).
    pub fn concrete_rule(&self, space: &RuleSpace) -> CliResult<PredictionRule> {
        let section = self
            .echo
            .rule
            .as_ref()
            .ok_or_else(|| "missing required section `rule`".to_string())?;
        let alpha0 = section
            .alpha0
            .clone()
            .ok_or_else(|| "missing required key `alpha0` in [rule]".to_string())?;
        let alpha1 = section
            .alpha1
            .clone()
            .ok_or_else(|| "missing required key `alpha1` in [rule]".to_string())?;
        let beta1 = section
            .beta1
            .clone()
            .ok_or_else(|| "missing required key `beta1` in [rule]".to_string())?;
        PredictionRule::new(space, alpha0, alpha1, beta1).map_err(|e| format!("{e}"))
    }

    pub fn build_loss(&mut self) -> CliResult<BregmanLoss> {
        let section = self
            .echo
            .erm
            .as_ref()
            .ok_or_else(|| "missing required section `erm`".to_string())?;
        let kind: BregmanKind = section.loss.parse().map_err(|e| format!("{e}"))?;
        Ok(BregmanLoss::new(kind))
    }

    /// Optimizer settings, materialized in the echo. The fit seed defaults
    /// to a stream derived from the master seed.
    pub fn build_opt(&mut self) -> CliResult<OptConfig> {
        let master = self.master_seed;
        let section = self
            .echo
            .erm
            .as_mut()
            .ok_or_else(|| "missing required section `erm`".to_string())?;
        let defaults = OptConfig::default();
        let opt = OptConfig {
            starts: *section.starts.get_or_insert(defaults.starts),
            grid_points: *section.grid_points.get_or_insert(defaults.grid_points),
            seed: *section.seed.get_or_insert(derive_seed(master, 4)),
            ..defaults
        };
        Ok(opt)
    }

    pub fn gamma(&mut self) -> CliResult<f64> {
        let section = self
            .echo
            .erm
            .as_mut()
            .ok_or_else(|| "missing required section `erm`".to_string())?;
        Ok(*section.gamma.get_or_insert(0.25))
    }

    pub fn n_mc(&mut self) -> CliResult<usize> {
        let section = self
            .echo
            .erm
            .as_mut()
            .ok_or_else(|| "missing required section `erm`".to_string())?;
        Ok(*section.n_mc.get_or_insert(40))
    }

    pub fn study_t_grid(&mut self) -> Vec<usize> {
        let section = self.echo.study.get_or_insert_with(StudySection::default);
        section
            .t_grid
            .get_or_insert_with(|| vec![250, 500, 1000, 2000, 4000])
            .clone()
    }

    pub fn study_replications(&mut self) -> usize {
        let section = self.echo.study.get_or_insert_with(StudySection::default);
        *section.replications.get_or_insert(200)
    }

    pub fn study_excess_grid(&mut self) -> usize {
        let section = self.echo.study.get_or_insert_with(StudySection::default);
        *section.excess_grid.get_or_insert(7)
    }

    pub fn preset_params(&self) -> CliResult<(String, PresetParams)> {
        let d = self
            .echo
            .dgp
            .as_ref()
            .ok_or_else(|| "missing required section `dgp`".to_string())?;
        Ok((
            d.preset.clone(),
            PresetParams {
                rho: d.rho,
                mu_h: d.mu_h,
                sigma_h: d.sigma_h,
                sigma_y: d.sigma_y,
                shape_y: d.shape_y,
                shape_h: d.shape_h,
                omega: d.omega,
                r_m: d.r_m,
                burn_in: d.burn_in,
            },
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIT_CONFIG: &str = r#"
master_seed = 42

[dgp]
preset = "ar1_noise"
rho = 0.5
t_total = 200

[erm]
loss = "square"

[output]
dir = "out"
"#;

    #[test]
    fn unknown_keys_are_rejected_with_the_key_name() {
        let err = RunConfig::from_toml("[dgp]\npreset = \"ar1_noise\"\nbogus = 1\n").unwrap_err();
        assert!(err.contains("bogus"), "{err}");
    }

    #[test]
    fn missing_required_keys_name_the_key() {
        let err = RunConfig::from_toml("[dgp]\nrho = 0.5\n").unwrap_err();
        assert!(err.contains("preset"), "{err}");
        let err = RunConfig::from_toml("[erm]\nstarts = 3\n").unwrap_err();
        assert!(err.contains("loss"), "{err}");
    }

    #[test]
    fn resolved_echo_reparses_to_an_identical_config() {
        let config = RunConfig::from_toml(FIT_CONFIG).unwrap();
        let mut resolved = Resolved::new(config, None, None);
        let spec = resolved.build_spec().unwrap();
        let _space = resolved.build_space(&spec).unwrap();
        let _opt = resolved.build_opt().unwrap();
        let _ = resolved.gamma().unwrap();
        let _ = resolved.n_mc().unwrap();

        let json = serde_json::to_string(&resolved.echo).unwrap();
        let reparsed: RunConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(reparsed, resolved.echo);

        // A second resolution of the echo is a fixed point.
        let mut second = Resolved::new(reparsed, None, None);
        let spec2 = second.build_spec().unwrap();
        let _ = second.build_space(&spec2).unwrap();
        let _ = second.build_opt().unwrap();
        let _ = second.gamma().unwrap();
        let _ = second.n_mc().unwrap();
        assert_eq!(second.echo, resolved.echo);
    }

    #[test]
    fn seed_override_wins() {
        let config = RunConfig::from_toml(FIT_CONFIG).unwrap();
        let resolved = Resolved::new(config, Some(7), None);
        assert_eq!(resolved.master_seed, 7);
        assert_eq!(resolved.echo.master_seed, Some(7));
    }
}
