//! Physical parameters of the particle and its cloud, the kinematic scales
//! derived from them, and the algebraic mass/coupling relations.
//!
//! All quantities are plain `f64` in a consistent unit system: SI for the
//! presets built from [`crate::constants`], or natural test units
//! (`M0 = 1`, `T = 1`, `c = 10`, `v0 = 1`) for the test suite.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{domain, Result};

/// Relative mismatch above which an explicit cloud rest mass is reported as
/// inconsistent with `m0 = M0 v0^2 / c^2`.
pub const CLOUD_MASS_MISMATCH: f64 = 1e-9;

/// Particle and cloud parameters with every derived kinematic scale.
///
/// Immutable once built; construct through [`SystemParams::new`] so the
/// invariants `0 < v0 < c`, `T > 0`, `M0 > 0` always hold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SystemParams {
    /// Particle rest mass `M0`.
    #[serde(rename = "M0")]
    pub rest_mass: f64,
    /// Cloud rest mass `m0`.
    #[serde(rename = "m0")]
    pub cloud_rest_mass: f64,
    /// Initial particle speed.
    pub v0: f64,
    /// Inerton (light) speed.
    pub c: f64,
    /// Particle-cloud collision period `T`.
    #[serde(rename = "T")]
    pub period: f64,
    /// Spatial period `v0 T`.
    pub lambda: f64,
    /// Cloud amplitude `c T`.
    #[serde(rename = "Lambda")]
    pub cloud_amplitude: f64,
    /// Relativistic particle mass.
    #[serde(rename = "M")]
    pub mass: f64,
    /// Relativistic cloud mass.
    #[serde(rename = "m")]
    pub cloud_mass: f64,
}

impl SystemParams {
    /// Build parameters with the cloud rest mass fixed by `m0 = M0 v0^2 / c^2`.
    pub fn new(rest_mass: f64, v0: f64, c: f64, period: f64) -> Result<Self> {
        validate(rest_mass, v0, c, period)?;
        let beta2 = (v0 / c) * (v0 / c);
        let gamma = 1.0 / (1.0 - beta2).sqrt();
        let mass = rest_mass * gamma;
        Ok(Self {
            rest_mass,
            cloud_rest_mass: rest_mass * beta2,
            v0,
            c,
            period,
            lambda: v0 * period,
            cloud_amplitude: c * period,
            mass,
            cloud_mass: mass * beta2,
        })
    }

    /// Natural test units: `M0 = 1`, `v0 = 1`, `c = 10`, `T = 1`.
    pub fn natural() -> Self {
        Self::new(1.0, 1.0, 10.0, 1.0).expect("natural units are valid")
    }

    /// Override the cloud rest mass.
    ///
    /// A value inconsistent with `M0 v0^2 / c^2` is accepted but logged.
    pub fn with_cloud_rest_mass(mut self, m0: f64) -> Result<Self> {
        if !(m0 > 0.0) || !m0.is_finite() {
            return Err(domain(format!(
                "cloud rest mass must be positive, got {m0}"
            )));
        }
        let expected = self.rest_mass * (self.v0 / self.c).powi(2);
        let mismatch = (m0 - expected).abs() / expected;
        if mismatch > CLOUD_MASS_MISMATCH {
            log::warn!(
                "cloud rest mass m0 = {m0:e} differs from M0 v0^2/c^2 = {expected:e} (relative {mismatch:.3e})"
            );
        }
        self.cloud_rest_mass = m0;
        self.cloud_mass = m0 / (1.0 - (self.v0 / self.c).powi(2)).sqrt();
        Ok(self)
    }

    /// `v0 / c`.
    pub fn beta(&self) -> f64 {
        self.v0 / self.c
    }

    /// Lorentz factor for the initial speed.
    pub fn gamma(&self) -> f64 {
        1.0 / (1.0 - self.beta() * self.beta()).sqrt()
    }

    /// Angular frequency of the particle oscillation, `pi / T`.
    pub fn omega(&self) -> f64 {
        PI / self.period
    }

    pub fn derived(&self) -> DerivedKinematics {
        let energy = 0.5 * self.mass * self.v0 * self.v0;
        DerivedKinematics {
            nu: 1.0 / (2.0 * self.period),
            collision_rate: 1.0 / self.period,
            energy,
            momentum: self.mass * self.v0,
            mean_drift: self.v0 * (1.0 - 2.0 / PI),
        }
    }
}

fn validate(rest_mass: f64, v0: f64, c: f64, period: f64) -> Result<()> {
    let finite = [rest_mass, v0, c, period].iter().all(|x| x.is_finite());
    if !finite {
        return Err(domain("parameters must be finite"));
    }
    if !(rest_mass > 0.0) {
        return Err(domain(format!(
            "rest mass M0 must be positive, got {rest_mass}"
        )));
    }
    if !(period > 0.0) {
        return Err(domain(format!("period T must be positive, got {period}")));
    }
    if !(v0 > 0.0) {
        return Err(domain(format!(
            "initial speed v0 must be positive, got {v0}"
        )));
    }
    if !(v0 < c) {
        return Err(domain(format!(
            "initial speed v0 = {v0} must be below c = {c}"
        )));
    }
    Ok(())
}

/// Frequencies, energy and momentum implied by a [`SystemParams`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DerivedKinematics {
    /// Oscillation frequency `1 / 2T`.
    pub nu: f64,
    /// Collision rate `1 / T`.
    pub collision_rate: f64,
    /// Kinetic energy `M v0^2 / 2`.
    #[serde(rename = "E")]
    pub energy: f64,
    /// Initial momentum `M v0`.
    #[serde(rename = "p0")]
    pub momentum: f64,
    /// Cycle-averaged particle speed `v0 (1 - 2/pi)`.
    pub mean_drift: f64,
}

pub fn derive_kinematics(
    rest_mass: f64,
    v0: f64,
    c: f64,
    period: f64,
) -> Result<(SystemParams, DerivedKinematics)> {
    let params = SystemParams::new(rest_mass, v0, c, period)?;
    Ok((params, params.derived()))
}

/// Mass of a particle from the deformation of its substrate cell:
/// `C V_sup / V_part`.
pub fn mass_from_deformation(constant: f64, cell_volume: f64, particle_volume: f64) -> Result<f64> {
    for (name, v) in [
        ("C", constant),
        ("V_sup", cell_volume),
        ("V_part", particle_volume),
    ] {
        if !(v > 0.0) || !v.is_finite() {
            return Err(domain(format!("{name} must be positive, got {v}")));
        }
    }
    Ok(constant * cell_volume / particle_volume)
}

/// Forward and backward particle-cloud coupling factors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Couplings {
    /// `sqrt(m / M)`, equal to `v0 / c` for the default cloud mass.
    pub forward: f64,
    /// `sqrt(M / m)`, equal to `c / v0` for the default cloud mass.
    pub backward: f64,
}

pub fn coupling_coefficients(params: &SystemParams) -> Couplings {
    Couplings {
        forward: (params.cloud_mass / params.mass).sqrt(),
        backward: (params.mass / params.cloud_mass).sqrt(),
    }
}
