//! Exact SI constants and reference values used by presets and checks.

/// Speed of light in vacuum [m/s].
pub const SPEED_OF_LIGHT: f64 = 2.997_924_58e8;
/// Planck constant [J s].
pub const PLANCK: f64 = 6.626_070_15e-34;
/// Reduced Planck constant [J s].
pub const HBAR: f64 = 1.054_571_817e-34;
/// Elementary charge [C].
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
/// Electron rest mass [kg].
pub const ELECTRON_MASS: f64 = 9.109_383_7e-31;
/// Mean Earth radius [m].
pub const EARTH_RADIUS: f64 = 6.371e6;

/// 1 m^2 expressed in cm^2.
pub const CM2_PER_M2: f64 = 1e4;
