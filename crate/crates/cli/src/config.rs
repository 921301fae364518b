//! JSON run configuration, presets and flag overrides.
//!
//! ```json
//! {
//!   "units": "natural",
//!   "parameters": { "M0": 1, "v0": 1, "c": 10, "T": 1 },
//!   "simulation": { "dt": 0.001, "t_end": 10, "mode": "aggregate" },
//!   "outputs": { "directory": "out", "formats": ["csv", "svg"] },
//!   "seed": 42
//! }
//! ```
//!
//! Exactly one of `T` and `h` must be given; with `h` the period follows
//! from the cyclic-action quantization. Unknown keys are rejected inside the
//! sections and ignored at the top level, so a run's metadata file can be
//! fed back as a configuration.

use std::fs;
use std::path::{Path, PathBuf};

use inerton_core::action::quantize;
use inerton_core::constants::SPEED_OF_LIGHT;
use inerton_core::dynamics::{InertonSpec, Mode};
use inerton_core::{presets, SystemParams};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Units {
    #[default]
    Natural,
    Si,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeName {
    #[default]
    Aggregate,
    Ensemble,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Parameters {
    #[serde(rename = "M0", skip_serializing_if = "Option::is_none")]
    pub rest_mass: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub v0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(rename = "T", skip_serializing_if = "Option::is_none")]
    pub period: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m0: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InertonInput {
    #[serde(rename = "T")]
    pub period: f64,
    pub v0: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Simulation {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_end: Option<f64>,
    #[serde(default)]
    pub mode: ModeName,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub inertons: Option<Vec<InertonInput>>,
    /// Shorthand for that many copies of the aggregate inerton.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_inertons: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outputs {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub directory: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub formats: Option<Vec<Format>>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub units: Option<Units>,
    #[serde(default)]
    pub parameters: Parameters,
    #[serde(default)]
    pub simulation: Simulation,
    #[serde(default)]
    pub outputs: Outputs,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// A configuration with every default filled in and every value checked.
#[derive(Debug, Clone, PartialEq)]
pub struct Resolved {
    pub units: Units,
    pub params: SystemParams,
    pub dt: f64,
    pub t_end: f64,
    pub mode: Mode,
    pub out_dir: PathBuf,
    pub formats: Vec<Format>,
    pub seed: u64,
    /// Explicit cloud rest mass, kept so the metadata reproduces the run.
    pub m0: Option<f64>,
    /// Action quantum, when the period came from one.
    pub h: Option<f64>,
}

pub const DEFAULT_SEED: u64 = 42;

fn overlay<T: Clone>(base: &mut Option<T>, top: &Option<T>) {
    if top.is_some() {
        base.clone_from(top);
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
    }

    pub fn preset(name: &str) -> Result<Self> {
        let p = presets::by_name(name).ok_or_else(|| {
            CliError::Validation(format!(
                "unknown preset `{name}`; available: {}",
                presets::PRESETS.join(", ")
            ))
        })?;
        let units = if name == "natural" {
            Units::Natural
        } else {
            Units::Si
        };
        Ok(Self {
            units: Some(units),
            parameters: Parameters {
                rest_mass: Some(p.rest_mass),
                v0: Some(p.v0),
                c: Some(p.c),
                period: Some(p.period),
                h: None,
                m0: None,
            },
            ..Self::default()
        })
    }

    /// Values set in `top` replace those here. A `T` or `h` in `top`
    /// displaces the other one, so a file can switch a preset to `h`.
    pub fn merge(mut self, top: &RunConfig) -> Self {
        overlay(&mut self.units, &top.units);
        let (p, q) = (&mut self.parameters, &top.parameters);
        overlay(&mut p.rest_mass, &q.rest_mass);
        overlay(&mut p.v0, &q.v0);
        overlay(&mut p.c, &q.c);
        overlay(&mut p.m0, &q.m0);
        if q.period.is_some() || q.h.is_some() {
            p.period = q.period;
            p.h = q.h;
        }
        let (s, t) = (&mut self.simulation, &top.simulation);
        overlay(&mut s.dt, &t.dt);
        overlay(&mut s.t_end, &t.t_end);
        if t.mode != ModeName::default() || t.inertons.is_some() || t.n_inertons.is_some() {
            s.mode = t.mode;
            s.inertons.clone_from(&t.inertons);
            s.n_inertons = t.n_inertons;
        }
        overlay(&mut self.outputs.directory, &top.outputs.directory);
        overlay(&mut self.outputs.formats, &top.outputs.formats);
        overlay(&mut self.seed, &top.seed);
        self
    }

    pub fn resolve(&self) -> Result<Resolved> {
        let p = &self.parameters;
        let require = |key: &str, v: Option<f64>| {
            v.ok_or_else(|| CliError::Validation(format!("parameters.{key} is required")))
        };
        let rest_mass = positive("parameters.M0", require("M0", p.rest_mass)?)?;
        let v0 = positive("parameters.v0", require("v0", p.v0)?)?;
        let units = self.units.unwrap_or_default();
        let c = match (p.c, units) {
            (Some(c), _) => positive("parameters.c", c)?,
            (None, Units::Si) => SPEED_OF_LIGHT,
            (None, Units::Natural) => {
                return Err(CliError::Validation(
                    "parameters.c is required in natural units".into(),
                ))
            }
        };
        if !(v0 < c) {
            return Err(CliError::Validation(format!(
                "parameters.v0 = {v0} must be below c = {c}"
            )));
        }
        let period = match (p.period, p.h) {
            (Some(t), None) => positive("parameters.T", t)?,
            (None, Some(h)) => {
                let h = positive("parameters.h", h)?;
                let mass = SystemParams::new(rest_mass, v0, c, 1.0)?.mass;
                quantize(mass, v0, c, h)?.period
            }
            (Some(_), Some(_)) => {
                return Err(CliError::Validation(
                    "parameters: give exactly one of T and h, not both".into(),
                ))
            }
            (None, None) => {
                return Err(CliError::Validation(
                    "parameters: one of T or h is required".into(),
                ))
            }
        };
        let mut params = SystemParams::new(rest_mass, v0, c, period)
            .map_err(|e| CliError::Validation(format!("parameters: {e}")))?;
        if let Some(m0) = p.m0 {
            params = params
                .with_cloud_rest_mass(positive("parameters.m0", m0)?)
                .map_err(|e| CliError::Validation(format!("parameters.m0: {e}")))?;
        }

        let s = &self.simulation;
        let dt = positive("simulation.dt", s.dt.unwrap_or(period / 1000.0))?;
        let t_end = positive("simulation.t_end", s.t_end.unwrap_or(10.0 * period))?;
        let mode = match s.mode {
            ModeName::Aggregate => Mode::Aggregate,
            ModeName::Ensemble => {
                let inertons = match (&s.inertons, s.n_inertons) {
                    (Some(list), None) if !list.is_empty() => list
                        .iter()
                        .enumerate()
                        .map(|(i, e)| {
                            let key = format!("simulation.inertons[{i}]");
                            let period = positive(&format!("{key}.T"), e.period)?;
                            let v0 = positive(&format!("{key}.v0"), e.v0)?;
                            if !(v0 < c) {
                                return Err(CliError::Validation(format!("{key}.v0 must be below c")));
                            }
                            Ok(InertonSpec { period, v0 })
                        })
                        .collect::<Result<Vec<_>>>()?,
                    (None, Some(n)) if n > 0 => vec![InertonSpec { period, v0 }; n],
                    _ => {
                        return Err(CliError::Validation(
                            "simulation: ensemble mode needs a non-empty `inertons` list or a positive `n_inertons`, not both"
                                .into(),
                        ))
                    }
                };
                Mode::Ensemble { inertons }
            }
        };

        Ok(Resolved {
            units,
            params,
            dt,
            t_end,
            mode,
            out_dir: self
                .outputs
                .directory
                .clone()
                .unwrap_or_else(|| PathBuf::from("out")),
            formats: self
                .outputs
                .formats
                .clone()
                .unwrap_or_else(|| vec![Format::Csv]),
            seed: self.seed.unwrap_or(DEFAULT_SEED),
            m0: p.m0,
            h: p.h,
        })
    }
}

fn positive(key: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::Validation(format!(
            "{key} must be positive and finite, got {v}"
        )))
    }
}

impl Resolved {
    /// The configuration that reproduces this run exactly.
    pub fn to_config(&self) -> RunConfig {
        let p = &self.params;
        let (mode, inertons) = match &self.mode {
            Mode::Aggregate => (ModeName::Aggregate, None),
            Mode::Ensemble { inertons } => (
                ModeName::Ensemble,
                Some(
                    inertons
                        .iter()
                        .map(|s| InertonInput {
                            period: s.period,
                            v0: s.v0,
                        })
                        .collect(),
                ),
            ),
        };
        RunConfig {
            units: Some(self.units),
            parameters: Parameters {
                rest_mass: Some(p.rest_mass),
                v0: Some(p.v0),
                c: Some(p.c),
                period: Some(p.period),
                h: None,
                m0: self.m0,
            },
            simulation: Simulation {
                dt: Some(self.dt),
                t_end: Some(self.t_end),
                mode,
                inertons,
                n_inertons: None,
            },
            outputs: Outputs {
                directory: Some(self.out_dir.clone()),
                formats: Some(self.formats.clone()),
            },
            seed: Some(self.seed),
        }
    }
}
