//! Quasi-static 1/f fluctuations of the SQUID bias and critical current,
//! propagated to first order into mode frequencies and hoppings.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{parametric_strength, CircuitParams, EigenmodeSolution, ParametricPair, Tlr};
use crate::error::{Error, Result};
use crate::units::HBAR;

/// Spectrum `S(ω) = 2π A²/ω` on `[omega_min, omega_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    /// Amplitude at 1 Hz, in the units of the fluctuating quantity.
    pub amplitude: f64,
    /// rad/s.
    pub omega_min: f64,
    /// rad/s.
    pub omega_max: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseBudget {
    /// `A²·ln(ω_max/ω_min)`.
    pub variance: f64,
    pub std_dev: f64,
    /// `5·A`.
    pub range_bound: f64,
}

pub fn noise_variance(n: &NoiseSpec) -> Result<NoiseBudget> {
    if !(n.omega_min > 0.0 && n.omega_min < n.omega_max && n.omega_max.is_finite()) {
        return Err(Error::invalid(
            "omega_min",
            format!("need 0 < omega_min < omega_max < ∞, got {} and {}", n.omega_min, n.omega_max),
        ));
    }
    if !n.amplitude.is_finite() {
        return Err(Error::invalid("amplitude", format!("must be finite, got {}", n.amplitude)));
    }
    let variance = n.amplitude * n.amplitude * (n.omega_max / n.omega_min).ln();
    Ok(NoiseBudget { variance, std_dev: variance.sqrt(), range_bound: 5.0 * n.amplitude.abs() })
}

/// First-order shifts of the three mode frequencies and the two hoppings, rad/s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Disturbance {
    /// Indexed A, B, C.
    pub delta_omega: [f64; 3],
    /// Indexed as [`ParametricPair::ALL`].
    pub delta_hopping: [f64; 2],
}

/// Quadratic Josephson energy of mode `m`, `(φ^m/φ0)²·E_J0/ħ`: the `a†a`
/// coefficient of `½(φ_J/φ0)²·E_J0` before the bias factor.
fn diagonal_scale(sol: &EigenmodeSolution, p: &CircuitParams, m: Tlr) -> f64 {
    sol.phi_over_phi0()[m.index()].powi(2) * p.e_j0() / HBAR
}

/// Bias shift `d_phi` (Φ0). Frequencies move with the derivative of
/// `cos(π Φ_dc)`, hoppings with that of `sin(π Φ_dc)`.
pub fn flux_noise_disturbance(sol: &EigenmodeSolution, p: &CircuitParams, d_phi: f64) -> Disturbance {
    let s = (PI * p.phi_dc).sin();
    let c = (PI * p.phi_dc).cos();
    let delta_omega = Tlr::ALL.map(|m| -PI * d_phi * s * diagonal_scale(sol, p, m));
    let delta_hopping = ParametricPair::ALL.map(|pair| {
        let t = parametric_strength(sol, p, pair).strength;
        if s == 0.0 {
            0.0
        } else {
            t * PI * d_phi * c / s
        }
    });
    Disturbance { delta_omega, delta_hopping }
}

/// Relative critical-current shift `d_i = δI_J0/I_J0`; every Josephson
/// term scales with `E_J0`.
pub fn critical_current_noise_disturbance(sol: &EigenmodeSolution, p: &CircuitParams, d_i: f64) -> Disturbance {
    let c = (PI * p.phi_dc).cos();
    let delta_omega = Tlr::ALL.map(|m| d_i * c * diagonal_scale(sol, p, m));
    let delta_hopping = ParametricPair::ALL.map(|pair| d_i * parametric_strength(sol, p, pair).strength);
    Disturbance { delta_omega, delta_hopping }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::solve_eigenmodes;
    use std::f64::consts::E;

    #[test]
    fn variance_examples() {
        let unit = NoiseSpec { amplitude: 2.0, omega_min: 3.0, omega_max: 3.0 * E };
        let b = noise_variance(&unit).unwrap();
        assert!((b.variance - 4.0).abs() < 1e-12);
        assert_eq!(b.range_bound, 10.0);
        let zero = NoiseSpec { amplitude: 0.0, omega_min: 1.0, omega_max: 1e9 };
        assert_eq!(noise_variance(&zero).unwrap().variance, 0.0);
        let decade = NoiseSpec { amplitude: 1.0, omega_min: 2.0 * PI, omega_max: 2.0 * PI * 1e9 };
        let b = noise_variance(&decade).unwrap();
        assert!((b.variance - 1e9f64.ln()).abs() < 1e-12);
        assert!(b.std_dev < b.range_bound);
        let bad = NoiseSpec { amplitude: 1.0, omega_min: 5.0, omega_max: 1.0 };
        assert!(noise_variance(&bad).is_err());
    }

    #[test]
    fn zero_fluctuation_is_harmless() {
        let p = CircuitParams::reference_device();
        let sol = solve_eigenmodes(&p).unwrap();
        let zero = Disturbance { delta_omega: [0.0; 3], delta_hopping: [0.0; 2] };
        assert_eq!(flux_noise_disturbance(&sol, &p, 0.0), zero);
        assert_eq!(critical_current_noise_disturbance(&sol, &p, 0.0), zero);
    }

    #[test]
    fn flux_shift_matches_finite_difference() {
        // Oracle: difference the bias-dependent factors directly.
        let p = CircuitParams::reference_device();
        let sol = solve_eigenmodes(&p).unwrap();
        let h = 1e-7;
        let d = flux_noise_disturbance(&sol, &p, h);
        let r = sol.phi_over_phi0();
        for m in 0..3 {
            let energy = |phi: f64| r[m] * r[m] * p.e_j0() * (PI * phi).cos() / HBAR;
            let fd = energy(p.phi_dc + h) - energy(p.phi_dc);
            assert!((d.delta_omega[m] - fd).abs() < 1e-5 * fd.abs());
        }
        for (i, pair) in ParametricPair::ALL.into_iter().enumerate() {
            let shifted = CircuitParams { phi_dc: p.phi_dc + h, ..p };
            let fd = parametric_strength(&sol, &shifted, pair).strength - parametric_strength(&sol, &p, pair).strength;
            assert!((d.delta_hopping[i] - fd).abs() < 1e-5 * fd.abs());
        }
    }
}
