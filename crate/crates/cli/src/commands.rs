use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use inerton_core::action::{cyclic_action, lab_frame_action, quantize, OscillatorSpec};
use inerton_core::constants::{EARTH_RADIUS, PLANCK};
use inerton_core::dynamics::{integrate, oracle_error, Trajectory};
use inerton_core::observables::{cross_section_bounds, resonator_dimensions};
use inerton_core::verify::{run_checks, CheckReport};
use inerton_core::Execution;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{Format, Resolved, RunConfig, Units};
use crate::error::{CliError, Result};
use crate::plot;

const PANELS: usize = 64;

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

fn write_file(
    path: &Path,
    body: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
) -> Result<()> {
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut w = BufWriter::new(file);
    body(&mut w)
        .and_then(|_| w.flush())
        .map_err(|e| CliError::io(path, e))
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    write_file(path, |w| {
        serde_json::to_writer_pretty(&mut *w, value)?;
        writeln!(w)
    })
}

/// Metadata: the reproducing configuration plus resolved parameters.
fn metadata(r: &Resolved, traj: &Trajectory) -> Value {
    let mut meta = serde_json::to_value(r.to_config()).expect("config serializes");
    let extra = json!({
        "tool": "inerton",
        "version": env!("CARGO_PKG_VERSION"),
        "resolved": r.params,
        "derived": r.params.derived(),
        "samples": traj.samples.len(),
        "events": traj.events.len(),
        "notes": traj.notes,
    });
    if let (Value::Object(m), Value::Object(e)) = (&mut meta, extra) {
        m.extend(e);
    }
    meta
}

pub struct SimulateOutput {
    pub trajectory: Trajectory,
    pub files: Vec<PathBuf>,
}

pub fn simulate(r: &Resolved, dir: &Path) -> Result<SimulateOutput> {
    let traj = integrate(&r.params, r.t_end, r.dt, &r.mode)?;
    create_dir(dir)?;
    let mut files = Vec::new();
    for format in &r.formats {
        match format {
            Format::Csv => {
                let csv = dir.join("trajectory.csv");
                write_file(&csv, |w| traj.write_csv(w))?;
                let gp = dir.join("trajectory.gp");
                write_file(&gp, |w| {
                    w.write_all(plot::gnuplot_script("trajectory.csv").as_bytes())
                })?;
                files.extend([csv, gp]);
            }
            Format::Json => {
                let path = dir.join("trajectory.json");
                write_json(
                    &path,
                    &json!({ "samples": traj.samples, "invariant_residuals": traj.invariant_residuals }),
                )?;
                files.push(path);
            }
            Format::Svg => {
                for (name, svg) in [
                    ("trajectory.svg", plot::trajectory_svg(&traj)),
                    ("phase.svg", plot::phase_svg(&traj)),
                ] {
                    let path = dir.join(name);
                    write_file(&path, |w| w.write_all(svg.as_bytes()))?;
                    files.push(path);
                }
            }
        }
    }
    let events = dir.join("events.json");
    write_json(&events, &traj.events_json())?;
    let meta = dir.join("metadata.json");
    write_json(&meta, &metadata(r, &traj))?;
    files.extend([events, meta]);
    Ok(SimulateOutput {
        trajectory: traj,
        files,
    })
}

/// The action quantum behind a configuration: the configured `h`, else
/// Planck's constant in SI units, else the cyclic action of the configured
/// period.
fn action_quantum(r: &Resolved) -> f64 {
    let p = &r.params;
    match (r.h, r.units) {
        (Some(h), _) => h,
        (None, Units::Si) => PLANCK,
        (None, Units::Natural) => p.mass * p.v0 * p.v0 * p.period,
    }
}

pub fn derive(r: &Resolved) -> Result<Value> {
    let p = &r.params;
    let h = action_quantum(r);
    let spec = OscillatorSpec::from_params(p);
    let sigma = cross_section_bounds(p);
    Ok(json!({
        "params": p,
        "derived": p.derived(),
        "quantized": quantize(p.mass, p.v0, p.c, h)?,
        "oscillator": spec,
        "cyclic_action": cyclic_action(&spec, PANELS)?,
        "lab_frame_action": lab_frame_action(p, PANELS)?,
        "cross_section_m2": sigma,
        "cross_section_cm2": sigma.to_cgs(),
        "resonator": resonator_dimensions(EARTH_RADIUS)?,
    }))
}

pub fn check(r: &Resolved, selection: &[String]) -> Result<Vec<CheckReport>> {
    Ok(run_checks(selection, &r.params, r.seed)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Axis {
    V0,
    #[value(name = "T")]
    Period,
    #[value(name = "M0")]
    M0,
    Dt,
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Axis::V0 => "v0",
            Axis::Period => "T",
            Axis::M0 => "M0",
            Axis::Dt => "dt",
        }
    }

    fn apply(self, base: &RunConfig, value: f64) -> RunConfig {
        let mut c = base.clone();
        match self {
            Axis::V0 => c.parameters.v0 = Some(value),
            Axis::Period => {
                c.parameters.period = Some(value);
                c.parameters.h = None;
            }
            Axis::M0 => c.parameters.rest_mass = Some(value),
            Axis::Dt => c.simulation.dt = Some(value),
        }
        c
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub value: f64,
    pub max_oracle_error: f64,
    pub max_invariant_residual: f64,
    pub cyclic_action: f64,
    pub lambda: f64,
    pub status: String,
}

impl SweepRow {
    pub fn ok(&self) -> bool {
        self.status == "ok"
    }
}

fn sweep_row(base: &RunConfig, axis: Axis, value: f64, dir: &Path) -> SweepRow {
    let failed = |status: String| SweepRow {
        value,
        max_oracle_error: f64::NAN,
        max_invariant_residual: f64::NAN,
        cyclic_action: f64::NAN,
        lambda: f64::NAN,
        status,
    };
    let r = match axis.apply(base, value).resolve() {
        Ok(r) => r,
        Err(e) => return failed(format!("failed: {e}")),
    };
    match simulate(&r, dir) {
        Ok(out) => SweepRow {
            value,
            max_oracle_error: oracle_error(&out.trajectory).max(),
            max_invariant_residual: out.trajectory.max_invariant_residual(),
            cyclic_action: cyclic_action(&OscillatorSpec::from_params(&r.params), PANELS)
                .unwrap_or(f64::NAN),
            lambda: r.params.lambda,
            status: "ok".to_string(),
        },
        Err(e) => failed(format!("failed: {e}")),
    }
}

/// One simulate run per value under `dir/<axis>_<index>`, then
/// `dir/summary.csv`. A failing value marks its row and the sweep goes on.
pub fn sweep(base: &RunConfig, axis: Axis, values: &[f64], dir: &Path) -> Result<Vec<SweepRow>> {
    if values.is_empty() {
        return Err(CliError::Validation(
            "sweep needs at least one value".into(),
        ));
    }
    create_dir(dir)?;
    let indexed: Vec<(usize, f64)> = values.iter().copied().enumerate().collect();
    let rows = Execution::default().map(&indexed, |&(i, v)| {
        sweep_row(base, axis, v, &dir.join(format!("{}_{i:03}", axis.name())))
    });
    let path = dir.join("summary.csv");
    let mut w = csv::Writer::from_path(&path).map_err(|e| CliError::io(&path, e.into()))?;
    for row in &rows {
        w.serialize(row)
            .map_err(|e| CliError::io(&path, e.into()))?;
    }
    w.flush().map_err(|e| CliError::io(&path, e))?;
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derive_natural_preset() {
        let r = RunConfig::preset("natural").unwrap().resolve().unwrap();
        let v = derive(&r).unwrap();
        assert_eq!(v["params"]["lambda"], 1.0);
        assert_eq!(v["params"]["Lambda"], 10.0);
        let q = &v["quantized"];
        assert!((q["lambda_dB"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn derive_electron_preset() {
        let r = RunConfig::preset("electron-1e6")
            .unwrap()
            .resolve()
            .unwrap();
        let v = derive(&r).unwrap();
        let lambda = v["quantized"]["lambda_dB"].as_f64().unwrap();
        assert!((lambda / 7.274e-10 - 1.0).abs() < 1e-3, "{lambda}");
    }

    #[test]
    fn sweep_rows_fail_independently() {
        let dir = tempfile::tempdir().unwrap();
        let mut base = RunConfig::preset("natural").unwrap();
        base.simulation.t_end = Some(2.0);
        let rows = sweep(&base, Axis::V0, &[1.0, 20.0, 2.0], dir.path()).unwrap();
        assert!(rows[0].ok() && rows[2].ok());
        assert!(!rows[1].ok());
        assert!((rows[2].lambda - 2.0 * rows[0].lambda).abs() < 1e-12);
        let summary = fs::read_to_string(dir.path().join("summary.csv")).unwrap();
        assert!(summary.starts_with(
            "value,max_oracle_error,max_invariant_residual,cyclic_action,lambda,status"
        ));
        assert!(sweep(&base, Axis::V0, &[], dir.path()).is_err());
    }
}
