//! Josephson-mediated couplings between the unit-cell modes.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{CircuitParams, EigenmodeSolution, Tlr};
use crate::error::{Error, Result};
use crate::units::{ELEMENTARY_CHARGE, HBAR, REDUCED_FLUX_QUANTUM};

/// d.c. mixing `T_mn = (φ^m φ^n/φ0²)·E_J0·cos(π Φ_dc)/ħ`, rad/s.
pub fn dc_mixing(sol: &EigenmodeSolution, p: &CircuitParams, m: Tlr, n: Tlr) -> Result<f64> {
    if m == n {
        return Err(Error::invalid("mode", format!("d.c. mixing needs two distinct modes, got {m} twice")));
    }
    Ok(mixing_scale(sol, m, n) * p.e_j0() * (PI * p.phi_dc).cos() / HBAR)
}

fn mixing_scale(sol: &EigenmodeSolution, m: Tlr, n: Tlr) -> f64 {
    let r = sol.phi_over_phi0();
    r[m.index()] * r[n.index()]
}

/// Quartic correction `(1/48)(φ^j/φ0)⁴·E_J0·cos(π Φ_dc)/ħ` of mode `j`, rad/s.
pub fn fourth_order_energy(sol: &EigenmodeSolution, p: &CircuitParams, j: Tlr) -> f64 {
    let r = sol.phi_over_phi0()[j.index()];
    r.powi(4) / 48.0 * p.e_j0() * (PI * p.phi_dc).cos() / HBAR
}

/// Largest quartic correction over the smallest d.c. mixing.
pub fn fourth_order_ratio(sol: &EigenmodeSolution, p: &CircuitParams) -> f64 {
    let e4 = Tlr::ALL.iter().map(|&j| fourth_order_energy(sol, p, j).abs()).fold(0.0, f64::max);
    let t_min = [(Tlr::A, Tlr::B), (Tlr::A, Tlr::C), (Tlr::B, Tlr::C)]
        .iter()
        .map(|&(m, n)| (mixing_scale(sol, m, n) * p.e_j0() * (PI * p.phi_dc).cos() / HBAR).abs())
        .fold(f64::INFINITY, f64::min);
    if t_min == 0.0 {
        0.0
    } else {
        e4 / t_min
    }
}

/// Bond bridged by one a.c. tone.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ParametricPair {
    /// Horizontal A ↔ B bond, tone at Δ.
    Ba,
    /// Vertical A ↔ C bond, tone at 2Δ.
    Ca,
}

impl ParametricPair {
    pub const ALL: [ParametricPair; 2] = [ParametricPair::Ba, ParametricPair::Ca];

    pub fn modes(self) -> (Tlr, Tlr) {
        match self {
            ParametricPair::Ba => (Tlr::B, Tlr::A),
            ParametricPair::Ca => (Tlr::C, Tlr::A),
        }
    }

    pub fn amplitude(self, p: &CircuitParams) -> f64 {
        match self {
            ParametricPair::Ba => p.phi_ac_ba,
            ParametricPair::Ca => p.phi_ac_ca,
        }
    }

    pub fn phase(self, p: &CircuitParams) -> f64 {
        match self {
            ParametricPair::Ba => p.theta_ba,
            ParametricPair::Ca => p.theta_ca,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            ParametricPair::Ba => "BA",
            ParametricPair::Ca => "CA",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParametricHopping {
    /// rad/s.
    pub strength: f64,
    /// Initial phase of the driving tone, rad.
    pub phase: f64,
}

/// Rotating-wave hopping from one tone:
/// `(φ^α φ^β/φ0²)·E_J0·sin(π Φ_dc)·(2π Φ_ac)/4 / ħ`.
pub fn parametric_strength(sol: &EigenmodeSolution, p: &CircuitParams, pair: ParametricPair) -> ParametricHopping {
    ParametricHopping { strength: pair.amplitude(p) * strength_per_flux(sol, p, pair), phase: pair.phase(p) }
}

fn strength_per_flux(sol: &EigenmodeSolution, p: &CircuitParams, pair: ParametricPair) -> f64 {
    let (a, b) = pair.modes();
    mixing_scale(sol, a, b) * p.e_j0() * (PI * p.phi_dc).sin() * (2.0 * PI) / 4.0 / HBAR
}

/// a.c. amplitude (Φ0) that would produce hopping `target` (rad/s).
pub fn amplitude_for_strength(sol: &EigenmodeSolution, p: &CircuitParams, pair: ParametricPair, target: f64) -> Result<f64> {
    let per_flux = strength_per_flux(sol, p, pair);
    if per_flux == 0.0 {
        return Err(Error::invalid("Phi_dc", "sin(π·Phi_dc) vanishes: no tone amplitude yields a hopping"));
    }
    Ok(target / per_flux)
}

/// SQUID plasma frequency `√(8 E_C E_J)/ħ` with the pair charging energy
/// `E_C = (2e)²/2C_J`, rad/s.
pub fn plasma_frequency(p: &CircuitParams) -> f64 {
    let e_c = (2.0 * ELEMENTARY_CHARGE).powi(2) / (2.0 * p.c_j);
    let e_j = p.i_j * REDUCED_FLUX_QUANTUM;
    (8.0 * e_c * e_j).sqrt() / HBAR
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::solve_eigenmodes;

    #[test]
    fn dc_mixing_symmetry_and_half_quantum() {
        let p = CircuitParams::reference_device();
        let sol = solve_eigenmodes(&p).unwrap();
        let ab = dc_mixing(&sol, &p, Tlr::A, Tlr::B).unwrap();
        assert_eq!(ab, dc_mixing(&sol, &p, Tlr::B, Tlr::A).unwrap());
        assert!(dc_mixing(&sol, &p, Tlr::A, Tlr::A).is_err());
        let half = CircuitParams { phi_dc: 0.5, ..p };
        assert!(dc_mixing(&sol, &half, Tlr::A, Tlr::C).unwrap().abs() < 1e-9 * ab);
    }

    #[test]
    fn parametric_linearity_and_bias() {
        let p = CircuitParams::reference_device();
        let sol = solve_eigenmodes(&p).unwrap();
        let base = parametric_strength(&sol, &p, ParametricPair::Ca).strength;
        let doubled = CircuitParams { phi_ac_ca: 2.0 * p.phi_ac_ca, ..p };
        assert!((parametric_strength(&sol, &doubled, ParametricPair::Ca).strength - 2.0 * base).abs() < 1e-12 * base);
        let unbiased = CircuitParams { phi_dc: 0.0, ..p };
        assert_eq!(parametric_strength(&sol, &unbiased, ParametricPair::Ca).strength, 0.0);
        assert!(amplitude_for_strength(&sol, &unbiased, ParametricPair::Ca, 1.0).is_err());
        let amp = amplitude_for_strength(&sol, &p, ParametricPair::Ca, base).unwrap();
        assert!((amp - p.phi_ac_ca).abs() < 1e-15);
        let phased = CircuitParams { theta_ba: 0.4, ..p };
        assert_eq!(parametric_strength(&sol, &phased, ParametricPair::Ba).phase, 0.4);
    }

    #[test]
    fn plasma_scaling() {
        let p = CircuitParams::reference_device();
        let quad = CircuitParams { c_j: 4.0 * p.c_j, ..p };
        assert!((plasma_frequency(&quad) * 2.0 - plasma_frequency(&p)).abs() < 1e-6 * plasma_frequency(&p));
    }

    #[test]
    fn quartic_vanishes_with_flux() {
        let p = CircuitParams::reference_device();
        let mut sol = solve_eigenmodes(&p).unwrap();
        sol.phi_rms = [0.0; 3];
        assert_eq!(fourth_order_energy(&sol, &p, Tlr::C), 0.0);
        assert_eq!(fourth_order_ratio(&sol, &p), 0.0);
    }
}
