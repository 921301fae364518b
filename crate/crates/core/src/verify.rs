//! Named, seeded checks over every module, run as a batch.
//!
//! Each check reduces to one measured number compared against a fixed
//! tolerance. Randomized checks draw their parameters from a ChaCha8 stream
//! keyed by the seed and the check's registry position, so a check's result
//! does not depend on which other checks run alongside it.

use std::f64::consts::PI;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::action::{cyclic_action, hj_residual, quantize, OscillatorSpec};
use crate::dynamics::{closed_form_trajectory, integrate, oracle_error, Mode, Trajectory};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::kinematics::coupling_coefficients;
use crate::lagrangian::{
    el_residual_with, eval_lagrangian_aggregate, eval_lagrangian_canonical,
    inverse_kappa_transform, kappa_transform, residual_scale, AggregateLagrangian, Coordinate,
    Parametrization, DEFAULT_FD_STEP,
};
use crate::observables::{cross_section_bounds, resonator_dimensions};
use crate::spin::{
    dirac_hamiltonian, spin_eigenvalue, spin_projection, total_hamiltonian, Channel, SpinContext,
};
use crate::SystemParams;

/// Randomized trials per property check.
pub const TRIALS: usize = 100;

/// Registered check names, in execution order.
pub const REGISTRY: [&str; 14] = [
    "oracle_agreement",
    "invariant_conservation",
    "periodicity",
    "convergence_order",
    "el_residual_aggregate",
    "transform_invariance",
    "action_triple_identity",
    "quantize_roundtrip",
    "hj_grid",
    "dirac_algebra",
    "dirac_spectrum",
    "channel_antisymmetry",
    "sigma_scaling",
    "resonator_ratio",
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub passed: bool,
    pub measured: f64,
    pub tolerance: f64,
    pub runtime_s: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl CheckReport {
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }

    /// Equality ignoring wall-clock runtime.
    pub fn same_outcome(&self, other: &Self) -> bool {
        self.name == other.name
            && self.passed == other.passed
            && self.measured.to_bits() == other.measured.to_bits()
            && self.tolerance == other.tolerance
            && self.error == other.error
    }
}

/// Run the named checks (all of them when `selection` is empty).
pub fn run_checks<S: AsRef<str>>(
    selection: &[S],
    params: &SystemParams,
    seed: u64,
) -> Result<Vec<CheckReport>> {
    run_checks_with(Execution::default(), selection, params, seed)
}

pub fn run_checks_with<S: AsRef<str>>(
    exec: Execution,
    selection: &[S],
    params: &SystemParams,
    seed: u64,
) -> Result<Vec<CheckReport>> {
    let mut indices = Vec::with_capacity(selection.len());
    for name in selection {
        let name = name.as_ref();
        match REGISTRY.iter().position(|r| *r == name) {
            Some(i) => indices.push(i),
            None => {
                return Err(Error::UnknownCheck {
                    name: name.to_string(),
                    registry: REGISTRY.join(", "),
                })
            }
        }
    }
    if indices.is_empty() {
        indices = (0..REGISTRY.len()).collect();
    }
    Ok(exec.map(&indices, |&i| run_one(i, params, seed)))
}

fn run_one(index: usize, params: &SystemParams, seed: u64) -> CheckReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    let start = Instant::now();
    let (tolerance, outcome) = match index {
        0 => (1e-6, oracle_agreement(params)),
        1 => (1e-8, invariant_conservation(params, &mut rng)),
        2 => (1e-6, periodicity(params)),
        3 => (1.0 / 8.0, convergence_order(params)),
        4 => (1e-5, el_residual_aggregate(params)),
        5 => (1e-9, transform_invariance(params, &mut rng)),
        6 => (1e-9, action_triple_identity(params, &mut rng)),
        7 => (1e-9, quantize_roundtrip(&mut rng)),
        8 => (1e-7, hj_grid(&mut rng)),
        9 => (1e-12, dirac_algebra(&mut rng)),
        10 => (1e-10, dirac_spectrum(&mut rng)),
        11 => (0.0, channel_antisymmetry(&mut rng)),
        12 => (1e-12, sigma_scaling(params, &mut rng)),
        13 => (1e-15, resonator_ratio(&mut rng)),
        _ => unreachable!("registry index out of range"),
    };
    let runtime_s = start.elapsed().as_secs_f64();
    let (measured, error) = match outcome {
        Ok(m) => (m, None),
        Err(e) => (f64::INFINITY, Some(e.to_string())),
    };
    CheckReport {
        name: REGISTRY[index].to_string(),
        passed: measured <= tolerance,
        measured,
        tolerance,
        runtime_s,
        error,
    }
}

/// Parameters drawn log-uniformly over `v0/c in [0.01, 0.9]`,
/// `T in [0.1, 10]`, `M0 in [0.1, 10]`, keeping `c` from `base`.
pub fn random_params(rng: &mut ChaCha8Rng, c: f64) -> SystemParams {
    let log_uniform =
        |rng: &mut ChaCha8Rng, lo: f64, hi: f64| (rng.gen_range(lo.ln()..hi.ln())).exp();
    let beta = log_uniform(rng, 0.01, 0.9);
    let period = log_uniform(rng, 0.1, 10.0);
    let mass = log_uniform(rng, 0.1, 10.0);
    SystemParams::new(mass, beta * c, c, period).expect("sampled inside the valid domain")
}

fn relative(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn reference_run(params: &SystemParams) -> Result<Trajectory> {
    integrate(
        params,
        10.0 * params.period,
        params.period / 1000.0,
        &Mode::Aggregate,
    )
}

fn oracle_agreement(params: &SystemParams) -> Result<f64> {
    Ok(oracle_error(&reference_run(params)?).max())
}

/// Worst invariant residual, or velocity-bound excess, over the reference
/// run and three randomized runs.
fn invariant_conservation(params: &SystemParams, rng: &mut ChaCha8Rng) -> Result<f64> {
    let mut runs = vec![*params];
    runs.extend((0..3).map(|_| random_params(rng, params.c)));
    let mut worst: f64 = 0.0;
    for p in &runs {
        let traj = reference_run(p)?;
        worst = worst.max(traj.max_invariant_residual());
        for s in &traj.samples {
            let over = [
                -s.particle_v / p.v0,
                s.particle_v / p.v0 - 1.0,
                s.cloud_v.abs() / p.c - 1.0,
                -s.cloud_x / p.cloud_amplitude,
            ]
            .into_iter()
            .fold(0.0, f64::max);
            if over > 1e-9 {
                worst = worst.max(over);
            }
        }
    }
    Ok(worst)
}

fn periodicity(params: &SystemParams) -> Result<f64> {
    let traj = reference_run(params)?;
    let per_period = 1000;
    let start = traj.samples[0];
    let drift = 2.0 * params.lambda * (1.0 - 2.0 / PI);
    let mut worst: f64 = 0.0;
    for n in 1..=5 {
        let s = traj.samples[2 * n * per_period];
        worst = worst
            .max((s.particle_x - start.particle_x - n as f64 * drift).abs() / params.lambda)
            .max((s.particle_v - start.particle_v).abs() / params.v0)
            .max((s.cloud_x - start.cloud_x).abs() / params.cloud_amplitude)
            // t = 2nT is a contact; the velocity sign there is the reset
            // convention, not dynamics
            .max((s.cloud_v.abs() - start.cloud_v.abs()).abs() / params.c);
    }
    Ok(worst)
}

/// Step sizes `T/100 .. T/1600` and the oracle error at each.
pub fn convergence_series(params: &SystemParams) -> Result<Vec<(f64, f64)>> {
    [100, 200, 400, 800, 1600]
        .iter()
        .map(|&k| {
            let dt = params.period / k as f64;
            let traj = integrate(params, 10.0 * params.period, dt, &Mode::Aggregate)?;
            Ok((dt, oracle_error(&traj).max()))
        })
        .collect()
}

/// Oracle error below which a halving no longer has to gain 8x.
pub const CONVERGENCE_FLOOR: f64 = 1e-10;

/// Largest error ratio `e(dt/2) / e(dt)` among halvings that start above
/// the floor.
fn convergence_order(params: &SystemParams) -> Result<f64> {
    let series = convergence_series(params)?;
    Ok(series
        .windows(2)
        .filter(|w| w[0].1 > CONVERGENCE_FLOOR)
        .map(|w| {
            if w[1].1 <= CONVERGENCE_FLOOR {
                0.0
            } else {
                w[1].1 / w[0].1
            }
        })
        .fold(0.0, f64::max))
}

fn el_residual_aggregate(params: &SystemParams) -> Result<f64> {
    let traj = closed_form_trajectory(params, 3.0 * params.period, 4000)?;
    let l = AggregateLagrangian { params: *params };
    let scale = residual_scale(params);
    let mut worst: f64 = 0.0;
    for coord in [Coordinate::Particle, Coordinate::Cloud] {
        // one check is one thread; the residual samples run sequentially
        let rep = el_residual_with(
            Execution::Sequential,
            &l,
            &traj,
            coord,
            DEFAULT_FD_STEP,
            Parametrization::Natural,
        )?;
        worst = worst.max(rep.normalized_max(scale));
    }
    Ok(worst)
}

/// Minimum number of in-domain states the transform check must see.
const MIN_VALID_STATES: usize = TRIALS / 2;

/// States where the square-root radicand is negative lie outside the model
/// and are skipped; too few valid states is itself a failure.
fn transform_invariance(params: &SystemParams, rng: &mut ChaCha8Rng) -> Result<f64> {
    let mut worst: f64 = 0.0;
    let mut valid = 0;
    for k in 0..2 * TRIALS {
        let p = if k == 0 {
            *params
        } else {
            random_params(rng, params.c)
        };
        let t = rng.gen_range(0.0..4.0) * p.period;
        let s = crate::dynamics::closed_form(t, &p);
        let aggregate = match eval_lagrangian_aggregate(&s, &p) {
            Ok(v) => v,
            Err(Error::NegativeRadicand { .. }) => continue,
            Err(e) => return Err(e),
        };
        let canonical = eval_lagrangian_canonical(&kappa_transform(&s, &p)?, &p)?;
        let back = inverse_kappa_transform(&kappa_transform(&s, &p)?, &p)?;
        worst = worst
            .max(relative(canonical, aggregate))
            .max((back.cloud_v - s.cloud_v).abs() / p.c);
        valid += 1;
        if valid == TRIALS {
            break;
        }
    }
    if valid < MIN_VALID_STATES {
        return Err(crate::error::precondition(format!(
            "only {valid} sampled states lie inside the model's validity"
        )));
    }
    Ok(worst)
}

/// Pairwise spread of `oint p dX`, `E 2T`, `p0 lambda`, together with the
/// kinematic identities `E / nu = p0 lambda`, `lambda / Lambda = v0 / c`
/// and `forward * backward = 1`.
fn action_triple_identity(params: &SystemParams, rng: &mut ChaCha8Rng) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for _ in 0..TRIALS {
        let p = random_params(rng, params.c);
        let d = p.derived();
        let spec = OscillatorSpec::from_params(&p);
        let loop_action = cyclic_action(&spec, 64)?;
        let energy_time = d.energy * 2.0 * p.period;
        let momentum_length = d.momentum * p.lambda;
        let k = coupling_coefficients(&p);
        worst = [
            relative(loop_action, energy_time),
            relative(loop_action, momentum_length),
            relative(energy_time, momentum_length),
            relative(d.energy / d.nu, momentum_length),
            relative(p.lambda / p.cloud_amplitude, p.v0 / p.c),
            (k.forward * k.backward - 1.0).abs(),
        ]
        .into_iter()
        .fold(worst, f64::max);
    }
    Ok(worst)
}

/// Round trip `quantize -> cyclic_action`, `nu = 1/2T`, and monotonic decay
/// of lambda in `M` and `v0`. A monotonicity violation reports infinity.
fn quantize_roundtrip(rng: &mut ChaCha8Rng) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for _ in 0..TRIALS {
        let m = (rng.gen_range(0.1f64.ln()..10f64.ln())).exp();
        let v0 = rng.gen_range(0.01..0.9);
        let h = (rng.gen_range(0.1f64.ln()..10f64.ln())).exp();
        let q = quantize(m, v0, 1.0, h)?;
        let back = cyclic_action(&q.oscillator()?, 64)?;
        worst = worst
            .max(relative(back, h))
            .max(relative(q.nu, 1.0 / (2.0 * q.period)));
        let heavier = quantize(m * 1.01, v0, 1.0, h)?;
        let faster = quantize(m, v0 * 1.01, 1.0, h)?;
        if !(heavier.lambda < q.lambda && faster.lambda < q.lambda) {
            return Ok(f64::INFINITY);
        }
    }
    Ok(worst)
}

fn hj_grid(rng: &mut ChaCha8Rng) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let p = random_params(rng, 1.0);
        let spec = OscillatorSpec::from_params(&p);
        for i in 0..50 {
            let x = (-0.99 + 1.98 * i as f64 / 49.0) * spec.amplitude;
            worst = worst.max(hj_residual(x, &spec, None)?.abs() / spec.energy);
        }
    }
    Ok(worst)
}

fn random_momentum(rng: &mut ChaCha8Rng) -> ([f64; 3], f64, f64) {
    let p = [
        rng.gen_range(-3.0..3.0),
        rng.gen_range(-3.0..3.0),
        rng.gen_range(-3.0..3.0),
    ];
    (p, rng.gen_range(0.1..3.0), rng.gen_range(0.5..2.0))
}

/// Anticommutators, Hermiticity, zero trace, and
/// `H^2 = total_hamiltonian(p, 0)^2 I`, all as absolute elementwise
/// deviations.
fn dirac_algebra(rng: &mut ChaCha8Rng) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for _ in 0..TRIALS {
        let (p, m0, c) = random_momentum(rng);
        let d = dirac_hamiltonian(p, m0, c);
        let r = d.verify();
        let e = total_hamiltonian(p, [0.0; 3], m0, c);
        let h2 = d.matrix * d.matrix;
        let mut linearization: f64 = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == j { e * e } else { 0.0 };
                linearization =
                    linearization.max((h2[(i, j)] - crate::spin::C64::new(want, 0.0)).norm());
            }
        }
        // scale-free in natural units; deviations relative to H^2 magnitude
        let rel_linearization = linearization / (e * e).max(1.0);
        worst = r
            .identities
            .iter()
            .map(|d| d.max_deviation)
            .chain([
                rel_linearization,
                r.h_squared_deviation,
                r.hermitian_deviation,
                r.trace,
            ])
            .fold(worst, f64::max);
    }
    Ok(worst)
}

fn dirac_spectrum(rng: &mut ChaCha8Rng) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for _ in 0..TRIALS {
        let (p, m0, c) = random_momentum(rng);
        worst = worst.max(dirac_hamiltonian(p, m0, c).verify().spectrum_deviation);
    }
    Ok(worst)
}

/// `|eps_up + eps_down|` and `|S_z(up) + S_z(down)|`; exact zero expected.
fn channel_antisymmetry(rng: &mut ChaCha8Rng) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for _ in 0..TRIALS {
        let ctx = SpinContext {
            channel: Channel::Up,
            charge: rng.gen_range(-5.0..5.0),
            b_z: rng.gen_range(-10.0..10.0),
            vector_potential: [rng.gen_range(-1.0..1.0), 0.0, 0.0],
            hbar: rng.gen_range(0.1..3.0),
            mass: rng.gen_range(0.1..5.0),
        };
        let up = spin_eigenvalue(&ctx)?;
        let down = spin_eigenvalue(&ctx.flipped())?;
        let (sz_up, sx, sy) = spin_projection(Channel::Up, ctx.hbar);
        let (sz_down, _, _) = spin_projection(Channel::Down, ctx.hbar);
        worst = worst
            .max((up + down).abs())
            .max((sz_up + sz_down).abs())
            .max(sx.abs())
            .max(sy.abs());
    }
    Ok(worst)
}

fn sigma_scaling(params: &SystemParams, rng: &mut ChaCha8Rng) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for k in 0..TRIALS {
        let p = if k == 0 {
            *params
        } else {
            random_params(rng, params.c)
        };
        let b = cross_section_bounds(&p);
        if !(b.lower < b.upper) {
            return Ok(f64::INFINITY);
        }
        worst = worst
            .max(relative(b.upper / b.lower, (p.c / p.v0).powi(2)))
            .max(relative(p.v0 / p.lambda, p.c / p.cloud_amplitude));
    }
    Ok(worst)
}

fn resonator_ratio(rng: &mut ChaCha8Rng) -> Result<f64> {
    let mut worst: f64 =
        (resonator_dimensions(crate::constants::EARTH_RADIUS)?.ratio - PI / 2.0).abs();
    for _ in 0..10 {
        let r = (rng.gen_range(-3.0..8.0) * std::f64::consts::LN_10).exp();
        worst = worst.max((resonator_dimensions(r)?.ratio - PI / 2.0).abs());
    }
    Ok(worst)
}
