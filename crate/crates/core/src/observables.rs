//! Cross-section window of the particle with its cloud and the geometry of
//! a planet-sized inerton resonator.

use std::f64::consts::PI;

use serde::Serialize;

use crate::constants::CM2_PER_M2;
use crate::error::{domain, Result};
use crate::SystemParams;

/// `lambda^2 < sigma < Lambda^2`, in m^2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CrossSectionBounds {
    pub lower: f64,
    pub upper: f64,
}

impl CrossSectionBounds {
    /// The same window in cm^2.
    pub fn to_cgs(self) -> Self {
        Self {
            lower: self.lower * CM2_PER_M2,
            upper: self.upper * CM2_PER_M2,
        }
    }
}

pub fn cross_section_bounds(params: &SystemParams) -> CrossSectionBounds {
    CrossSectionBounds {
        lower: params.lambda * params.lambda,
        upper: params.cloud_amplitude * params.cloud_amplitude,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResonatorGeometry {
    /// Half the great circle, travelled both ways: `2 pi R`.
    #[serde(rename = "L1")]
    pub circumferential: f64,
    /// Diameter travelled both ways: `4 R`.
    #[serde(rename = "L2")]
    pub diametral: f64,
    pub ratio: f64,
}

pub fn resonator_dimensions(radius: f64) -> Result<ResonatorGeometry> {
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(domain(format!("radius must be positive, got {radius}")));
    }
    let circumferential = 2.0 * PI * radius;
    let diametral = 4.0 * radius;
    Ok(ResonatorGeometry {
        circumferential,
        diametral,
        ratio: circumferential / diametral,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::{EARTH_RADIUS, SPEED_OF_LIGHT};
    use approx::assert_relative_eq;

    #[test]
    fn atomic_electron_window() {
        // lambda = 1e-10 m with Lambda = 3e-8 m
        let v0 = SPEED_OF_LIGHT / 300.0;
        let p = SystemParams::new(1.0, v0, SPEED_OF_LIGHT, 1e-10 / v0).unwrap();
        let b = cross_section_bounds(&p);
        assert_relative_eq!(b.lower, 1e-20, max_relative = 1e-12);
        assert_relative_eq!(b.upper, 9e-16, max_relative = 1e-12);
        let cgs = b.to_cgs();
        assert_relative_eq!(cgs.lower, 1e-16, max_relative = 1e-12);
        assert_relative_eq!(cgs.upper, 9e-12, max_relative = 1e-12);
    }

    #[test]
    fn scaling() {
        let p = SystemParams::new(1.0, 0.3, 1.0, 2.0).unwrap();
        let q = SystemParams::new(1.0, 0.3, 1.0, 4.0).unwrap();
        let (a, b) = (cross_section_bounds(&p), cross_section_bounds(&q));
        assert_relative_eq!(b.lower / a.lower, 4.0, max_relative = 1e-12);
        assert_relative_eq!(
            a.upper / a.lower,
            (1.0f64 / 0.3).powi(2),
            max_relative = 1e-12
        );
        let near = cross_section_bounds(&SystemParams::new(1.0, 1.0 - 1e-12, 1.0, 1.0).unwrap());
        assert_relative_eq!(near.lower, near.upper, max_relative = 1e-11);
    }

    #[test]
    fn resonator_examples() {
        let g = resonator_dimensions(EARTH_RADIUS).unwrap();
        assert_relative_eq!(g.circumferential, 4.00304e7, max_relative = 1e-5);
        assert_relative_eq!(g.diametral, 2.5484e7, max_relative = 1e-12);
        assert_relative_eq!(g.ratio, PI / 2.0, max_relative = 1e-15);
        let g = resonator_dimensions(1.0).unwrap();
        assert_eq!((g.circumferential, g.diametral), (2.0 * PI, 4.0));
        assert!(resonator_dimensions(0.0).is_err());
        assert!(resonator_dimensions(-2.0).is_err());
    }
}
