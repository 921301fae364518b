//! Named parameter sets.

use crate::action::quantize;
use crate::constants::{ELECTRON_MASS, PLANCK, SPEED_OF_LIGHT};
use crate::SystemParams;

pub const PRESETS: [&str; 3] = ["natural", "electron-1e6", "atomic-electron"];

/// Free electron at 1e6 m/s with the period fixed by a cyclic action `h`.
pub fn electron_1e6() -> SystemParams {
    let v0 = 1e6;
    let mass = SystemParams::new(ELECTRON_MASS, v0, SPEED_OF_LIGHT, 1.0)
        .expect("valid")
        .mass;
    let q = quantize(mass, v0, SPEED_OF_LIGHT, PLANCK).expect("valid");
    SystemParams::new(ELECTRON_MASS, v0, SPEED_OF_LIGHT, q.period).expect("valid")
}

/// Electron bound in an atom: `lambda = 1e-10 m`, `v0 = c / 300`, so
/// `Lambda = 3e-8 m`.
pub fn atomic_electron() -> SystemParams {
    let v0 = SPEED_OF_LIGHT / 300.0;
    SystemParams::new(ELECTRON_MASS, v0, SPEED_OF_LIGHT, 1e-10 / v0).expect("valid")
}

pub fn by_name(name: &str) -> Option<SystemParams> {
    match name {
        "natural" => Some(SystemParams::natural()),
        "electron-1e6" => Some(electron_1e6()),
        "atomic-electron" => Some(atomic_electron()),
        _ => None,
    }
}
