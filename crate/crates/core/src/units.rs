//! Physical constants (SI, CODATA 2018 exact values where defined) and
//! conversions between angular and ordinary frequency.

use std::f64::consts::PI;

/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Elementary charge, C.
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
/// Superconducting flux quantum Φ0 = h/2e, Wb.
pub const FLUX_QUANTUM: f64 = 2.0 * PI * HBAR / (2.0 * ELEMENTARY_CHARGE);
/// Reduced flux quantum φ0 = Φ0/2π = ħ/2e, Wb.
pub const REDUCED_FLUX_QUANTUM: f64 = HBAR / (2.0 * ELEMENTARY_CHARGE);

pub fn mhz_to_angular(f_mhz: f64) -> f64 {
    2.0 * PI * f_mhz * 1e6
}

pub fn angular_to_mhz(omega: f64) -> f64 {
    omega / (2.0 * PI * 1e6)
}

pub fn ghz_to_angular(f_ghz: f64) -> f64 {
    2.0 * PI * f_ghz * 1e9
}

pub fn angular_to_ghz(omega: f64) -> f64 {
    omega / (2.0 * PI * 1e9)
}

pub fn khz_to_angular(f_khz: f64) -> f64 {
    2.0 * PI * f_khz * 1e3
}

pub fn angular_to_khz(omega: f64) -> f64 {
    omega / (2.0 * PI * 1e3)
}
