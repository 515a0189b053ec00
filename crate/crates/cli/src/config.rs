//! Run configuration: a single TOML file describing grid, time stepping,
//! model parameters (explicit or via the rotation preset), initial data and
//! monitor tolerances.

use std::path::Path;

use anyhow::{bail, Context, Result};
use gch_core::dynamics::Controls;
use gch_core::model::{
    make_grid, rotation_preset, FieldState, InitialCondition, ModelParams, RotationConstants,
};
use gch_core::monitors::SignPattern;
use gch_core::spectral::SpectralWorkspace;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub half_length: f64,
    pub n: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct TimeConfig {
    pub t_end: f64,
    #[serde(default = "default_dt_max")]
    pub dt_max: f64,
    #[serde(default = "default_cfl")]
    pub cfl: f64,
}

fn default_dt_max() -> f64 {
    1e-2
}

fn default_cfl() -> f64 {
    0.3
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ParamsConfig {
    #[serde(default)]
    pub alpha: f64,
    #[serde(default)]
    pub beta: f64,
    #[serde(default)]
    pub gamma: f64,
    #[serde(default)]
    pub big_gamma: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RotationConfig {
    pub omega: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, rename_all = "snake_case", tag = "kind")]
pub enum IcConfig {
    Gaussian { amplitude: f64, width: f64, #[serde(default)] center: f64 },
    Sech2 { amplitude: f64, width: f64, #[serde(default)] center: f64 },
    MomentumBump { amplitude: f64, width: f64, #[serde(default)] center: f64 },
    MomentumOdd { amplitude: f64, width: f64, #[serde(default)] center: f64 },
    /// Velocity samples, one decimal per line, exactly `n` of them.
    Table { file: String },
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct MonitorConfig {
    #[serde(default = "default_output_every")]
    pub output_every: usize,
    #[serde(default = "default_y_max")]
    pub y_max: f64,
    #[serde(default = "default_boundary_fraction")]
    pub boundary_fraction: f64,
    #[serde(default = "default_tol_sign")]
    pub tol_sign: f64,
    #[serde(default = "default_dealias")]
    pub dealias: bool,
    /// Override of the certificate parameter sigma; default `1/(1+36K)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    /// Momentum sign pattern to track, when the data is supposed to keep one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pattern: Option<SignPattern>,
}

fn default_output_every() -> usize {
    50
}

fn default_y_max() -> f64 {
    1e3
}

fn default_boundary_fraction() -> f64 {
    1e-3
}

fn default_tol_sign() -> f64 {
    1e-10
}

fn default_dealias() -> bool {
    true
}

impl Default for MonitorConfig {
    fn default() -> MonitorConfig {
        MonitorConfig {
            output_every: default_output_every(),
            y_max: default_y_max(),
            boundary_fraction: default_boundary_fraction(),
            tol_sign: default_tol_sign(),
            dealias: default_dealias(),
            sigma: None,
            pattern: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub grid: GridConfig,
    pub time: TimeConfig,
    /// Explicit model parameters; mutually exclusive with `rotation`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<ParamsConfig>,
    /// Coriolis preset; mutually exclusive with `params`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rotation: Option<RotationConfig>,
    pub ic: IcConfig,
    #[serde(default)]
    pub monitors: MonitorConfig,
    /// Echoed into reports; reserved for randomized run families.
    #[serde(default)]
    pub seed: u64,
}

impl RunConfig {
    pub fn from_path(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        RunConfig::from_str(&text)
    }

    pub fn from_str(text: &str) -> Result<RunConfig> {
        let cfg: RunConfig = toml::from_str(text).context("parsing config")?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        match (&self.params, &self.rotation) {
            (Some(_), Some(_)) => bail!("give exactly one of [params] and [rotation], not both"),
            (None, None) => bail!("give exactly one of [params] and [rotation]"),
            _ => {}
        }
        make_grid(self.grid.half_length, self.grid.n)?;
        if !(self.time.t_end > 0.0) {
            bail!("time.t_end must be positive");
        }
        if !(self.time.dt_max > 0.0) || !(self.time.cfl > 0.0) {
            bail!("time.dt_max and time.cfl must be positive");
        }
        if self.monitors.output_every == 0 {
            bail!("monitors.output_every must be at least 1");
        }
        self.resolve_params()?;
        Ok(())
    }

    /// Model parameters plus the rotation constants when the preset is used.
    pub fn resolve_params(&self) -> Result<(ModelParams, Option<RotationConstants>)> {
        if let Some(p) = &self.params {
            let params = ModelParams {
                alpha: p.alpha,
                beta: p.beta,
                gamma: p.gamma,
                big_gamma: p.big_gamma,
            };
            params.validate()?;
            Ok((params, None))
        } else {
            let omega = self.rotation.as_ref().expect("validated").omega;
            let (params, consts) = rotation_preset(omega)?;
            Ok((params, Some(consts)))
        }
    }

    pub fn controls(&self) -> Controls {
        Controls {
            t_end: self.time.t_end,
            dt_max: self.time.dt_max,
            c_cfl: self.time.cfl,
            dealias: self.monitors.dealias,
            output_every: self.monitors.output_every,
            y_max: self.monitors.y_max,
            boundary_fraction: self.monitors.boundary_fraction,
        }
    }

    pub fn build_initial_state(&self, ws: &SpectralWorkspace) -> Result<FieldState> {
        let grid = make_grid(self.grid.half_length, self.grid.n)?;
        let ic = match &self.ic {
            IcConfig::Gaussian { amplitude, width, center } => InitialCondition::Gaussian {
                amplitude: *amplitude,
                width: *width,
                center: *center,
            },
            IcConfig::Sech2 { amplitude, width, center } => InitialCondition::Sech2 {
                amplitude: *amplitude,
                width: *width,
                center: *center,
            },
            IcConfig::MomentumBump { amplitude, width, center } => {
                InitialCondition::MomentumBump {
                    amplitude: *amplitude,
                    width: *width,
                    center: *center,
                }
            }
            IcConfig::MomentumOdd { amplitude, width, center } => InitialCondition::MomentumOdd {
                amplitude: *amplitude,
                width: *width,
                center: *center,
            },
            IcConfig::Table { file } => {
                let text = std::fs::read_to_string(file)
                    .with_context(|| format!("reading table ic {file}"))?;
                let u = text
                    .lines()
                    .map(str::trim)
                    .filter(|l| !l.is_empty())
                    .map(|l| l.parse::<f64>().with_context(|| format!("bad sample {l:?}")))
                    .collect::<Result<Vec<f64>>>()?;
                if u.len() != grid.n {
                    bail!("table ic has {} samples, grid needs {}", u.len(), grid.n);
                }
                InitialCondition::Table { u }
            }
        };
        Ok(ic.build(&grid, ws)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
        [grid]
        half_length = 20.0
        n = 256

        [time]
        t_end = 1.0

        [params]
        alpha = 1.0

        [ic]
        kind = "gaussian"
        amplitude = 0.2
        width = 1.0
    "#;

    #[test]
    fn minimal_config_parses_with_defaults() {
        let cfg = RunConfig::from_str(MINIMAL).unwrap();
        assert_eq!(cfg.monitors.output_every, 50);
        assert_eq!(cfg.time.dt_max, 1e-2);
        let (params, consts) = cfg.resolve_params().unwrap();
        assert_eq!(params.alpha, 1.0);
        assert!(consts.is_none());
    }

    #[test]
    fn params_and_rotation_are_mutually_exclusive() {
        let both = format!("{MINIMAL}\n[rotation]\nomega = 0.5\n");
        assert!(RunConfig::from_str(&both).is_err());
        let neither = MINIMAL.replace("[params]\n        alpha = 1.0", "");
        assert!(RunConfig::from_str(&neither).is_err());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let bad = format!("{MINIMAL}\nunknown_key = 3\n");
        assert!(RunConfig::from_str(&bad).is_err());
    }

    #[test]
    fn rotation_preset_resolves() {
        let cfg_text = MINIMAL.replace("[params]\n        alpha = 1.0", "[rotation]\n        omega = 0.0");
        let cfg = RunConfig::from_str(&cfg_text).unwrap();
        let (params, consts) = cfg.resolve_params().unwrap();
        assert!(consts.is_some());
        assert_eq!(params.beta, 0.0);
        assert_eq!(params.gamma, 0.0);
    }

    #[test]
    fn config_round_trips_through_toml() {
        let cfg = RunConfig::from_str(MINIMAL).unwrap();
        let text = toml::to_string(&cfg).unwrap();
        let back = RunConfig::from_str(&text).unwrap();
        assert_eq!(cfg, back);
    }
}
