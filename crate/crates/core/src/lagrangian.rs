//! Relativistic Lagrangians of the particle and its cloud, the canonical
//! change of variables, and a finite-difference Euler-Lagrange residual.
//!
//! The aggregate Lagrangian is
//!
//! ```text
//! L = -M0 c^2 sqrt(1 - Q / (M0 c^2))
//! Q = M0 X'^2 + m0 x'^2 - (2 pi / T) sqrt(M0 m0) (X x' + v0 x)
//! ```
//!
//! Since `L = F(Q)`, its extremals coincide with those of `Q` only when time
//! is the natural parameter along the path, i.e. when `F'(Q)` is held fixed
//! under the time derivative. [`Parametrization::Natural`] evaluates the
//! residual that way; [`Parametrization::Coordinate`] differentiates the
//! full momentum including the varying `F'(Q)`.

use std::f64::consts::PI;
use std::io::{self, Write};

use serde::Serialize;

use crate::dynamics::Trajectory;
use crate::error::{domain, precondition, Error, Result};
use crate::exec::Execution;
use crate::kinematics::SystemParams;
use crate::state::AggregateState;

/// Default relative perturbation for state-space derivatives.
pub const DEFAULT_FD_STEP: f64 = 1e-5;
/// Samples excluded on each side of a contact event.
pub const EVENT_WINDOW_SAMPLES: usize = 5;

/// `-M0 c^2 sqrt(1 - v0^2 / c^2)`.
pub fn eval_lagrangian_relativistic(v0: f64, rest_mass: f64, c: f64) -> Result<f64> {
    if !(v0.abs() < c) {
        return Err(domain(format!("|v0| = {} must be below c = {c}", v0.abs())));
    }
    Ok(-rest_mass * c * c * (1.0 - (v0 * v0) / (c * c)).sqrt())
}

fn aggregate_radicand(s: &AggregateState, p: &SystemParams) -> f64 {
    let r = p.cloud_rest_mass / p.rest_mass;
    let w = PI / p.period;
    // Q / M0
    let q = s.particle_v * s.particle_v + r * s.cloud_v * s.cloud_v
        - 2.0 * w * r.sqrt() * (s.particle_x * s.cloud_v + p.v0 * s.cloud_x);
    1.0 - q / (p.c * p.c)
}

fn check_radicand(radicand: f64) -> Result<f64> {
    if radicand < 0.0 || radicand.is_nan() {
        Err(Error::NegativeRadicand { radicand })
    } else {
        Ok(radicand)
    }
}

pub fn eval_lagrangian_aggregate(s: &AggregateState, p: &SystemParams) -> Result<f64> {
    let radicand = check_radicand(aggregate_radicand(s, p))?;
    Ok(-p.rest_mass * p.c * p.c * radicand.sqrt())
}

/// State expressed through the transformed cloud rate
/// `kappa' = x' - (pi/T) X sqrt(M0/m0)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CanonicalState {
    pub t: f64,
    #[serde(rename = "X")]
    pub particle_x: f64,
    #[serde(rename = "dXdt")]
    pub particle_v: f64,
    pub kappa_rate: f64,
    #[serde(rename = "x")]
    pub cloud_x: f64,
}

fn mass_ratio_root(p: &SystemParams) -> Result<f64> {
    if !(p.cloud_rest_mass > 0.0) {
        return Err(domain(
            "cloud rest mass m0 must be positive for the canonical transform",
        ));
    }
    Ok((p.rest_mass / p.cloud_rest_mass).sqrt())
}

pub fn kappa_transform(s: &AggregateState, p: &SystemParams) -> Result<CanonicalState> {
    let k = mass_ratio_root(p)?;
    Ok(CanonicalState {
        t: s.t,
        particle_x: s.particle_x,
        particle_v: s.particle_v,
        kappa_rate: s.cloud_v - PI / p.period * s.particle_x * k,
        cloud_x: s.cloud_x,
    })
}

pub fn inverse_kappa_transform(s: &CanonicalState, p: &SystemParams) -> Result<AggregateState> {
    let k = mass_ratio_root(p)?;
    Ok(AggregateState {
        t: s.t,
        particle_x: s.particle_x,
        particle_v: s.particle_v,
        cloud_x: s.cloud_x,
        cloud_v: s.kappa_rate + PI / p.period * s.particle_x * k,
    })
}

/// Canonical-form Lagrangian: a harmonic term `-M0 (pi/T)^2 X^2` and the
/// transformed cloud rate replace the `X x'` coupling.
pub fn eval_lagrangian_canonical(s: &CanonicalState, p: &SystemParams) -> Result<f64> {
    let r = p.cloud_rest_mass / p.rest_mass;
    let w = PI / p.period;
    let q = s.particle_v * s.particle_v - w * w * s.particle_x * s.particle_x
        + r * s.kappa_rate * s.kappa_rate
        - 2.0 * w * r.sqrt() * p.v0 * s.cloud_x;
    let radicand = check_radicand(1.0 - q / (p.c * p.c))?;
    Ok(-p.rest_mass * p.c * p.c * radicand.sqrt())
}

/// A Lagrangian over the aggregate coordinates.
pub trait Lagrangian: Sync {
    fn value(&self, s: &AggregateState) -> Result<f64>;

    /// `F'(Q)` up to a constant factor when `L = F(Q)` with `Q` quadratic in
    /// the velocities; 1 for a Lagrangian that is itself quadratic.
    fn natural_weight(&self, _s: &AggregateState) -> Result<f64> {
        Ok(1.0)
    }
}

impl<F> Lagrangian for F
where
    F: Fn(&AggregateState) -> Result<f64> + Sync,
{
    fn value(&self, s: &AggregateState) -> Result<f64> {
        self(s)
    }
}

/// Square-root Lagrangian of the particle and its cloud as one object.
#[derive(Debug, Clone, Copy)]
pub struct AggregateLagrangian {
    pub params: SystemParams,
}

impl Lagrangian for AggregateLagrangian {
    fn value(&self, s: &AggregateState) -> Result<f64> {
        eval_lagrangian_aggregate(s, &self.params)
    }

    fn natural_weight(&self, s: &AggregateState) -> Result<f64> {
        let radicand = check_radicand(aggregate_radicand(s, &self.params))?;
        Ok(1.0 / radicand.sqrt())
    }
}

/// `Q / 2`, the weak-coupling expansion of [`AggregateLagrangian`] without
/// the rest-energy constant.
#[derive(Debug, Clone, Copy)]
pub struct QuadraticLagrangian {
    pub params: SystemParams,
}

impl Lagrangian for QuadraticLagrangian {
    fn value(&self, s: &AggregateState) -> Result<f64> {
        let p = &self.params;
        let q_over_m0c2 = 1.0 - aggregate_radicand(s, p);
        Ok(0.5 * p.rest_mass * p.c * p.c * q_over_m0c2)
    }
}

/// Uncoupled kinetic terms `M0 X'^2 / 2 + m0 x'^2 / 2`.
#[derive(Debug, Clone, Copy)]
pub struct FreeLagrangian {
    pub particle_mass: f64,
    pub cloud_mass: f64,
}

impl Lagrangian for FreeLagrangian {
    fn value(&self, s: &AggregateState) -> Result<f64> {
        Ok(0.5 * self.particle_mass * s.particle_v * s.particle_v
            + 0.5 * self.cloud_mass * s.cloud_v * s.cloud_v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Coordinate {
    Particle,
    Cloud,
}

/// How the time derivative of the generalized momentum is taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Parametrization {
    /// `F'(Q)` frozen at the sample time.
    #[default]
    Natural,
    /// Plain coordinate-time derivative.
    Coordinate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExcludedWindow {
    pub center: f64,
    pub start: f64,
    pub end: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ElResidualReport {
    pub coordinate: Coordinate,
    pub parametrization: Parametrization,
    pub times: Vec<f64>,
    /// `d/dt (dL/dq') - dL/dq`; NaN at the two endpoints.
    pub residuals: Vec<f64>,
    pub excluded: Vec<bool>,
    pub max_abs_residual: f64,
    pub excluded_windows: Vec<ExcludedWindow>,
}

impl ElResidualReport {
    pub fn normalized_max(&self, scale: f64) -> f64 {
        self.max_abs_residual / scale
    }

    /// Write `t,residual,excluded_flag`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "t,residual,excluded_flag")?;
        for ((t, r), e) in self.times.iter().zip(&self.residuals).zip(&self.excluded) {
            writeln!(w, "{t:.16e},{r:.16e},{}", u8::from(*e))?;
        }
        Ok(())
    }
}

/// Force scale `M0 v0 pi / T` used to normalize residuals.
pub fn residual_scale(p: &SystemParams) -> f64 {
    p.rest_mass * p.v0 * PI / p.period
}

struct Partials {
    momentum: f64,
    force: f64,
    weight: f64,
}

fn partials<L: Lagrangian + ?Sized>(
    l: &L,
    s: &AggregateState,
    coord: Coordinate,
    dq: f64,
    dv: f64,
) -> Result<Partials> {
    let shift = |dq: f64, dv: f64| {
        let mut t = *s;
        match coord {
            Coordinate::Particle => {
                t.particle_x += dq;
                t.particle_v += dv;
            }
            Coordinate::Cloud => {
                t.cloud_x += dq;
                t.cloud_v += dv;
            }
        }
        t
    };
    let momentum = (l.value(&shift(0.0, dv))? - l.value(&shift(0.0, -dv))?) / (2.0 * dv);
    let force = (l.value(&shift(dq, 0.0))? - l.value(&shift(-dq, 0.0))?) / (2.0 * dq);
    Ok(Partials {
        momentum,
        force,
        weight: l.natural_weight(s)?,
    })
}

/// Euler-Lagrange residual of `l` along `traj` for one coordinate.
///
/// `fd_step` is a relative perturbation: the coordinate is shifted by
/// `fd_step` times `lambda` (particle) or `Lambda` (cloud), the velocity by
/// `fd_step` times `v0` or `c`. Samples within five steps of a contact event
/// are excluded from the maximum.
pub fn el_residual<L: Lagrangian + ?Sized>(
    l: &L,
    traj: &Trajectory,
    coord: Coordinate,
    fd_step: f64,
    parametrization: Parametrization,
) -> Result<ElResidualReport> {
    el_residual_with(
        Execution::default(),
        l,
        traj,
        coord,
        fd_step,
        parametrization,
    )
}

pub fn el_residual_with<L: Lagrangian + ?Sized>(
    exec: Execution,
    l: &L,
    traj: &Trajectory,
    coord: Coordinate,
    fd_step: f64,
    parametrization: Parametrization,
) -> Result<ElResidualReport> {
    let samples = &traj.samples;
    let n = samples.len();
    if n < 9 {
        return Err(precondition(format!("need at least 9 samples, got {n}")));
    }
    if !(fd_step > 0.0) {
        return Err(precondition(format!(
            "fd_step must be positive, got {fd_step}"
        )));
    }
    let dt = samples[1].t - samples[0].t;
    for w in samples.windows(2) {
        let h = w[1].t - w[0].t;
        if ((h - dt) / dt).abs() > 1e-9 {
            return Err(precondition(format!(
                "samples must be uniformly spaced; found step {h:e} against {dt:e}"
            )));
        }
    }
    let p = &traj.params;
    if dt / p.period < 4.0 * fd_step {
        return Err(precondition(format!(
            "sample spacing dt/T = {:e} is below 4 fd_step = {:e}",
            dt / p.period,
            4.0 * fd_step
        )));
    }
    let (dq, dv) = match coord {
        Coordinate::Particle => (fd_step * p.lambda, fd_step * p.v0),
        Coordinate::Cloud => (fd_step * p.cloud_amplitude, fd_step * p.c),
    };

    let parts: Vec<Partials> = exec
        .map(samples, |s| partials(l, s, coord, dq, dv))
        .into_iter()
        .collect::<Result<_>>()?;

    let half = EVENT_WINDOW_SAMPLES as f64 * dt * (1.0 + 1e-9);
    let excluded_windows: Vec<ExcludedWindow> = traj
        .reflections()
        .map(|e| ExcludedWindow {
            center: e.t,
            start: e.t - half,
            end: e.t + half,
        })
        .collect();

    let mut residuals = vec![f64::NAN; n];
    let mut excluded = vec![true; n];
    let mut max_abs: f64 = 0.0;
    for i in 1..n - 1 {
        let (prev, here, next) = (&parts[i - 1], &parts[i], &parts[i + 1]);
        let (wp, wn) = match parametrization {
            Parametrization::Natural => (here.weight / prev.weight, here.weight / next.weight),
            Parametrization::Coordinate => (1.0, 1.0),
        };
        let r = (next.momentum * wn - prev.momentum * wp) / (2.0 * dt) - here.force;
        residuals[i] = r;
        let t = samples[i].t;
        let in_window = excluded_windows.iter().any(|w| t >= w.start && t <= w.end);
        excluded[i] = in_window;
        if !in_window {
            max_abs = max_abs.max(r.abs());
        }
    }

    Ok(ElResidualReport {
        coordinate: coord,
        parametrization,
        times: samples.iter().map(|s| s.t).collect(),
        residuals,
        excluded,
        max_abs_residual: max_abs,
        excluded_windows,
    })
}
