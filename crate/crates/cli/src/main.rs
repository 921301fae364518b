//! `inerton`: simulate, derive, check and sweep the particle/cloud model.
// `!(a < b)` also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod error;
mod plot;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::commands::Axis;
use crate::config::{Format, RunConfig};
use crate::error::{CliError, Result};

#[derive(Debug, Parser)]
#[command(
    name = "inerton",
    version,
    about = "Particle and inerton-cloud oscillator simulator"
)]
struct Cli {
    /// JSON run configuration; its values override the preset.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Built-in parameter set: natural, electron-1e6, atomic-electron.
    #[arg(long, global = true)]
    preset: Option<String>,

    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Seed for randomized checks.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output formats, comma separated.
    #[arg(long, global = true, value_enum, value_delimiter = ',')]
    format: Vec<Format>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Integrate the equations of motion and write the trajectory.
    Simulate {
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long)]
        t_end: Option<f64>,
    },
    /// Print derived kinematics, quantized scales and observables as JSON.
    Derive,
    /// Run verification checks and print one JSON line per check.
    Check {
        /// Check names; all registered checks when omitted.
        names: Vec<String>,
    },
    /// Repeat the simulation over values of one parameter.
    Sweep {
        #[arg(long, value_enum)]
        axis: Axis,
        /// Comma-separated values; `dt` also accepts `T/<n>`.
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<String>,
    },
}

impl Cli {
    /// Preset, then file, then flags.
    fn config(&self) -> Result<RunConfig> {
        let mut cfg = match &self.preset {
            Some(name) => RunConfig::preset(name)?,
            None => RunConfig::default(),
        };
        if let Some(path) = &self.config {
            cfg = cfg.merge(&RunConfig::load(path)?);
        } else if self.preset.is_none() {
            return Err(CliError::Validation(
                "no parameters given; pass --config or --preset".into(),
            ));
        }
        if let Some(out) = &self.out {
            cfg.outputs.directory = Some(out.clone());
        }
        if let Some(seed) = self.seed {
            cfg.seed = Some(seed);
        }
        if !self.format.is_empty() {
            cfg.outputs.formats = Some(self.format.clone());
        }
        if let Command::Simulate { dt, t_end } = &self.command {
            if dt.is_some() {
                cfg.simulation.dt = *dt;
            }
            if t_end.is_some() {
                cfg.simulation.t_end = *t_end;
            }
        }
        Ok(cfg)
    }
}

fn parse_value(raw: &str, axis: Axis, period: f64) -> Result<f64> {
    let raw = raw.trim();
    let parsed = match (axis, raw.strip_prefix("T/")) {
        (Axis::Dt, Some(n)) => n.parse::<f64>().map(|n| period / n),
        _ => raw.parse::<f64>(),
    };
    parsed.map_err(|_| CliError::Validation(format!("sweep value `{raw}` is not a number")))
}

fn run(cli: &Cli) -> Result<()> {
    let cfg = cli.config()?;
    let resolved = cfg.resolve()?;
    let out_dir = resolved.out_dir.clone();
    match &cli.command {
        Command::Simulate { .. } => {
            let out = commands::simulate(&resolved, &out_dir)?;
            log::info!(
                "{} samples, {} events",
                out.trajectory.samples.len(),
                out.trajectory.events.len()
            );
            for f in out.files {
                println!("{}", f.display());
            }
        }
        Command::Derive => {
            let v = commands::derive(&resolved)?;
            let text = serde_json::to_string_pretty(&v).expect("json");
            println!("{text}");
            if cli.out.is_some() || cfg.outputs.directory.is_some() {
                std::fs::create_dir_all(&out_dir).map_err(|e| CliError::io(&out_dir, e))?;
                let path = out_dir.join("derive.json");
                std::fs::write(&path, format!("{text}\n")).map_err(|e| CliError::io(&path, e))?;
            }
        }
        Command::Check { names } => {
            let reports = commands::check(&resolved, names)?;
            let lines: Vec<String> = reports.iter().map(|r| r.to_json_line()).collect();
            for line in &lines {
                println!("{line}");
            }
            if cli.out.is_some() || cfg.outputs.directory.is_some() {
                std::fs::create_dir_all(&out_dir).map_err(|e| CliError::io(&out_dir, e))?;
                let path = out_dir.join("report.jsonl");
                std::fs::write(&path, lines.join("\n") + "\n")
                    .map_err(|e| CliError::io(&path, e))?;
            }
            let failed: Vec<&str> = reports
                .iter()
                .filter(|r| !r.passed)
                .map(|r| r.name.as_str())
                .collect();
            if !failed.is_empty() {
                return Err(CliError::Runtime(format!(
                    "checks failed: {}",
                    failed.join(", ")
                )));
            }
        }
        Command::Sweep { axis, values } => {
            let values = values
                .iter()
                .map(|v| parse_value(v, *axis, resolved.params.period))
                .collect::<Result<Vec<_>>>()?;
            let rows = commands::sweep(&cfg, *axis, &values, &out_dir)?;
            println!("{}", out_dir.join("summary.csv").display());
            let failed = rows.iter().filter(|r| !r.ok()).count();
            if failed > 0 {
                return Err(CliError::Runtime(format!(
                    "{failed} of {} sweep runs failed",
                    rows.len()
                )));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
