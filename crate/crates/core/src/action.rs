//! Effective oscillator of the particle about its centre of inertia: the
//! Hamiltonian, the shortened action and its Hamilton-Jacobi residual, the
//! cyclic action increment, and the de Broglie relations obtained by setting
//! that increment equal to an action quantum `h`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::dynamics::closed_form;
use crate::error::{domain, precondition, Result};
use crate::exec::Execution;
use crate::quadrature::GaussLegendre;
use crate::SystemParams;

/// Smallest panel count accepted by [`cyclic_action`].
pub const MIN_PANELS: usize = 64;

/// Default finite-difference step of [`hj_residual`], relative to the amplitude.
pub const DEFAULT_HJ_STEP: f64 = 1e-5;

const RULE_ORDER: usize = 8;

/// Harmonic oscillator `H = p^2/2M + M omega^2 X^2 / 2` with the particle's
/// energy and amplitude.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OscillatorSpec {
    #[serde(rename = "M")]
    pub mass: f64,
    /// `pi / T`.
    pub omega: f64,
    /// `M v0^2 / 2`.
    #[serde(rename = "E")]
    pub energy: f64,
    /// `v0 / omega`, equal to `lambda / pi`.
    pub amplitude: f64,
    /// `M v0`.
    pub p_max: f64,
}

impl OscillatorSpec {
    pub fn new(mass: f64, v0: f64, period: f64) -> Result<Self> {
        for (name, v) in [("M", mass), ("v0", v0), ("T", period)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(domain(format!("{name} must be positive, got {v}")));
            }
        }
        let omega = PI / period;
        Ok(Self {
            mass,
            omega,
            energy: 0.5 * mass * v0 * v0,
            amplitude: v0 / omega,
            p_max: mass * v0,
        })
    }

    /// Oscillator of the relativistic particle mass in `params`.
    pub fn from_params(params: &SystemParams) -> Self {
        Self::new(params.mass, params.v0, params.period).expect("validated parameters")
    }

    /// Half the oscillation period, `pi / omega`.
    pub fn period(&self) -> f64 {
        PI / self.omega
    }

    pub fn v0(&self) -> f64 {
        self.p_max / self.mass
    }
}

pub fn effective_hamiltonian(p: f64, x: f64, spec: &OscillatorSpec) -> f64 {
    p * p / (2.0 * spec.mass) + 0.5 * spec.mass * spec.omega * spec.omega * x * x
}

/// Momentum on the energy shell, `sqrt(2 M E - M^2 omega^2 X^2)`.
fn shell_momentum(x: f64, spec: &OscillatorSpec) -> f64 {
    let m = spec.mass;
    let w = spec.omega;
    (2.0 * m * spec.energy - m * m * w * w * x * x)
        .max(0.0)
        .sqrt()
}

/// Shortened action `S1(X) = int_0^X p(xi) d xi`.
pub fn shortened_action(x: f64, spec: &OscillatorSpec) -> Result<f64> {
    if !(x.abs() < spec.amplitude) {
        return Err(domain(format!(
            "|X| = {:e} must lie inside the amplitude {:e}",
            x.abs(),
            spec.amplitude
        )));
    }
    let rule = GaussLegendre::new(RULE_ORDER);
    let tol = 1e-15 * spec.p_max * spec.amplitude;
    Ok(rule.adaptive(|xi| shell_momentum(xi, spec), 0.0, x, tol))
}

/// Hamilton-Jacobi residual `(S1')^2/2M + M omega^2 X^2/2 - E` with `S1'`
/// from a central difference of the quadrature. `fd_step` is relative to the
/// amplitude; pass `None` for [`DEFAULT_HJ_STEP`].
pub fn hj_residual(x: f64, spec: &OscillatorSpec, fd_step: Option<f64>) -> Result<f64> {
    let rel = fd_step.unwrap_or(DEFAULT_HJ_STEP);
    if !(rel > 0.0) {
        return Err(precondition(format!("fd_step must be positive, got {rel}")));
    }
    if !(x.abs() < spec.amplitude) {
        return Err(domain(format!(
            "|X| = {:e} must lie inside the amplitude {:e}",
            x.abs(),
            spec.amplitude
        )));
    }
    // shrink the step so both stencil points stay in the allowed region
    let room = spec.amplitude - x.abs();
    let h = (rel * spec.amplitude).min(0.5 * room);
    let ahead = shortened_action(x + h, spec)?;
    let behind = shortened_action(x - h, spec)?;
    let slope = (ahead - behind) / (2.0 * h);
    Ok(effective_hamiltonian(slope, x, spec) - spec.energy)
}

/// `oint p dX` over one cycle of the oscillator orbit
/// `X = A sin(omega t)`, `p = p_max cos(omega t)`, `t in [0, 2T]`.
pub fn cyclic_action(spec: &OscillatorSpec, panels: usize) -> Result<f64> {
    if panels < MIN_PANELS {
        return Err(precondition(format!(
            "cyclic action needs at least {MIN_PANELS} panels, got {panels}"
        )));
    }
    let rule = GaussLegendre::new(RULE_ORDER);
    let w = spec.omega;
    let integrand = |t: f64| spec.p_max * (w * t).cos() * spec.amplitude * w * (w * t).cos();
    Ok(rule.composite(integrand, 0.0, 2.0 * spec.period(), panels))
}

/// Cyclic actions for a batch of oscillators.
pub fn cyclic_action_batch(
    exec: Execution,
    specs: &[OscillatorSpec],
    panels: usize,
) -> Vec<Result<f64>> {
    exec.map(specs, |s| cyclic_action(s, panels))
}

/// `int_0^{2T} M (dX/dt)^2 dt` along the lab-frame closed-form orbit.
///
/// Equals `M v0^2 T (3 - 8/pi)`, not the oscillator action; a diagnostic for
/// callers tempted to integrate the lab trajectory instead.
pub fn lab_frame_action(params: &SystemParams, panels: usize) -> Result<f64> {
    if panels < MIN_PANELS {
        return Err(precondition(format!(
            "lab-frame action needs at least {MIN_PANELS} panels, got {panels}"
        )));
    }
    let rule = GaussLegendre::new(RULE_ORDER);
    let t = params.period;
    let integrand = |s: f64| {
        let v = closed_form(s, params).particle_v;
        params.mass * v * v
    };
    // split at the kink t = T
    let half = panels / 2;
    Ok(rule.composite(integrand, 0.0, t, half)
        + rule.composite(integrand, t, 2.0 * t, panels - half))
}

/// `M v0^2 T (3 - 8/pi)`.
pub fn lab_frame_action_exact(params: &SystemParams) -> f64 {
    params.mass * params.v0 * params.v0 * params.period * (3.0 - 8.0 / PI)
}

/// Kinematic scales fixed by a cyclic action equal to `h`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuantizedKinematics {
    pub h: f64,
    /// `h / (M v0)`.
    #[serde(rename = "lambda_dB")]
    pub lambda: f64,
    /// `E / h = M v0^2 / 2h`.
    pub nu: f64,
    /// `h / (M v0^2)`.
    #[serde(rename = "T")]
    pub period: f64,
    /// `lambda c / v0`.
    #[serde(rename = "Lambda")]
    pub cloud_amplitude: f64,
    #[serde(rename = "E")]
    pub energy: f64,
    #[serde(rename = "p0")]
    pub momentum: f64,
}

pub fn quantize(mass: f64, v0: f64, c: f64, h: f64) -> Result<QuantizedKinematics> {
    for (name, v) in [("M", mass), ("v0", v0), ("c", c), ("h", h)] {
        if !(v > 0.0) || !v.is_finite() {
            return Err(domain(format!("{name} must be positive, got {v}")));
        }
    }
    if !(v0 < c) {
        return Err(domain(format!("v0 = {v0} must be below c = {c}")));
    }
    let momentum = mass * v0;
    let lambda = h / momentum;
    let energy = 0.5 * mass * v0 * v0;
    Ok(QuantizedKinematics {
        h,
        lambda,
        nu: energy / h,
        period: h / (mass * v0 * v0),
        cloud_amplitude: lambda * c / v0,
        energy,
        momentum,
    })
}

impl QuantizedKinematics {
    /// Oscillator built from the quantized period, for the round trip back
    /// through [`cyclic_action`].
    pub fn oscillator(&self) -> Result<OscillatorSpec> {
        let v0 = self.lambda / self.period;
        OscillatorSpec::new(self.momentum / v0, v0, self.period)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn spec_invariant() {
        let s = OscillatorSpec::new(2.0, 3.0, 0.7).unwrap();
        let e = 0.5 * s.mass * s.omega * s.omega * s.amplitude * s.amplitude;
        assert_relative_eq!(e, s.energy, max_relative = 1e-12);
        assert!(OscillatorSpec::new(0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn hamiltonian_examples() {
        let s = OscillatorSpec::new(1.3, 0.8, 2.0).unwrap();
        assert_eq!(effective_hamiltonian(0.0, 0.0, &s), 0.0);
        assert_relative_eq!(
            effective_hamiltonian(s.p_max, 0.0, &s),
            s.energy,
            max_relative = 1e-15
        );
        assert_relative_eq!(
            effective_hamiltonian(0.0, s.amplitude, &s),
            s.energy,
            max_relative = 1e-14
        );
    }

    #[test]
    fn shortened_action_matches_closed_form() {
        // int_0^X sqrt(a^2 - b^2 xi^2) = (X sqrt(a^2 - b^2 X^2) + a^2/b asin(bX/a)) / 2
        let s = OscillatorSpec::new(1.0, 1.0, 1.0).unwrap();
        let a = (2.0 * s.mass * s.energy).sqrt();
        let b = s.mass * s.omega;
        for u in [0.1, 0.5, 0.9, -0.7] {
            let x = u * s.amplitude;
            let exact = 0.5 * (x * (a * a - b * b * x * x).sqrt() + a * a / b * (b * x / a).asin());
            assert_relative_eq!(
                shortened_action(x, &s).unwrap(),
                exact,
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn hj_residual_contract() {
        let s = OscillatorSpec::new(1.0, 1.0, 1.0).unwrap();
        assert!(hj_residual(0.0, &s, None).unwrap().abs() <= 1e-9 * s.energy);
        assert!(hj_residual(0.5 * s.amplitude, &s, None).unwrap().abs() <= 1e-7 * s.energy);
        assert!(hj_residual(0.99 * s.amplitude, &s, None).unwrap().abs() <= 1e-7 * s.energy);
        assert!(hj_residual(0.999 * s.amplitude, &s, None).unwrap().abs() <= 1e-4 * s.energy);
        assert!(hj_residual(s.amplitude, &s, None).is_err());
        assert!(hj_residual(-1.5 * s.amplitude, &s, None).is_err());
    }

    #[test]
    fn cyclic_action_examples() {
        let s = OscillatorSpec::new(2.0, 3.0, 1.0).unwrap();
        assert_relative_eq!(cyclic_action(&s, 64).unwrap(), 18.0, max_relative = 1e-12);
        let s = OscillatorSpec::new(1.0, 1.0, 1.0).unwrap();
        let a = cyclic_action(&s, 64).unwrap();
        assert_relative_eq!(a, 1.0, max_relative = 1e-12);
        assert_relative_eq!(a / 2.0, s.energy, max_relative = 1e-12);
        assert_relative_eq!(a / 1.0, s.p_max, max_relative = 1e-12);
        assert!(cyclic_action(&s, 63).is_err());
    }

    #[test]
    fn lab_frame_action_differs() {
        let p = SystemParams::natural();
        let got = lab_frame_action(&p, 64).unwrap();
        assert_relative_eq!(got, lab_frame_action_exact(&p), max_relative = 1e-12);
        let oscillator = cyclic_action(&OscillatorSpec::from_params(&p), 64).unwrap();
        assert!((got - oscillator).abs() > 0.1 * oscillator);
    }

    #[test]
    fn quantize_examples() {
        let q = quantize(1.0, 1.0, 10.0, 1.0).unwrap();
        assert_eq!((q.lambda, q.period, q.nu), (1.0, 1.0, 0.5));

        let q = quantize(9.1093837e-31, 1e6, 2.99792458e8, 6.62607015e-34).unwrap();
        assert_relative_eq!(q.lambda, 7.2740e-10, max_relative = 1e-4);
        assert_relative_eq!(q.period, 7.2740e-16, max_relative = 1e-4);
        assert_relative_eq!(q.cloud_amplitude, 2.1807e-7, max_relative = 1e-4);
        assert_relative_eq!(q.nu, 1.0 / (2.0 * q.period), max_relative = 1e-12);

        let back = cyclic_action(&q.oscillator().unwrap(), 64).unwrap();
        assert_relative_eq!(back, q.h, max_relative = 1e-9);

        assert!(quantize(1.0, 2.0, 1.0, 1.0).is_err());
        assert!(quantize(1.0, 0.5, 1.0, 0.0).is_err());
    }

    #[test]
    fn lambda_decreases_in_mass_and_speed() {
        let base = quantize(1.0, 0.3, 1.0, 1.0).unwrap().lambda;
        assert!(quantize(1.1, 0.3, 1.0, 1.0).unwrap().lambda < base);
        assert!(quantize(1.0, 0.31, 1.0, 1.0).unwrap().lambda < base);
    }

    #[test]
    fn batch_modes_agree() {
        let specs: Vec<_> = (1..20)
            .map(|k| OscillatorSpec::new(k as f64, 0.1 * k as f64, 1.0 / k as f64).unwrap())
            .collect();
        let a = cyclic_action_batch(Execution::Sequential, &specs, 64);
        let b = cyclic_action_batch(Execution::Parallel, &specs, 64);
        assert_eq!(a, b);
    }
}
