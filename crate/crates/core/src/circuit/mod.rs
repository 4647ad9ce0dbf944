//! Unit-cell circuit: three λ/2 transmission-line resonators (TLRs) grounded
//! through one shared SQUID.
//!
//! Everything here is SI. Fluxes that the experiment quotes in units of the
//! flux quantum `Φ0` (d.c. bias, a.c. amplitudes, noise) stay in those units.

mod coupling;
mod eigenmode;
mod noise;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::REDUCED_FLUX_QUANTUM;

pub use coupling::{
    amplitude_for_strength, dc_mixing, fourth_order_energy, fourth_order_ratio, parametric_strength,
    plasma_frequency, ParametricHopping, ParametricPair,
};
pub use eigenmode::{esr, solve_eigenmodes, EigenmodeSolution};
pub use noise::{critical_current_noise_disturbance, flux_noise_disturbance, noise_variance, Disturbance, NoiseBudget, NoiseSpec};

/// One of the three resonators (and the eigenmode living mostly in it).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Tlr {
    A,
    B,
    C,
}

impl Tlr {
    pub const ALL: [Tlr; 3] = [Tlr::A, Tlr::B, Tlr::C];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn label(self) -> char {
        match self {
            Tlr::A => 'A',
            Tlr::B => 'B',
            Tlr::C => 'C',
        }
    }
}

impl fmt::Display for Tlr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircuitParams {
    /// Inductance per unit length, H/m.
    pub l: f64,
    /// Capacitance per unit length, F/m.
    pub c: f64,
    /// Resonator lengths `(L_A, L_B, L_C)`, m.
    pub lengths: [f64; 3],
    /// Maximal SQUID critical current, A.
    pub i_j0: f64,
    /// d.c. flux bias, Φ0.
    pub phi_dc: f64,
    /// Effective critical current at the bias point, A.
    pub i_j: f64,
    /// Junction capacitance, F.
    pub c_j: f64,
    /// a.c. amplitude of the 2Δ tone (A ↔ C), Φ0.
    pub phi_ac_ca: f64,
    /// a.c. amplitude of the Δ tone (A ↔ B), Φ0.
    pub phi_ac_ba: f64,
    pub theta_ca: f64,
    pub theta_ba: f64,
}

impl Default for CircuitParams {
    fn default() -> Self {
        Self::reference_device()
    }
}

impl CircuitParams {
    /// The representative device parameters.
    pub fn reference_device() -> Self {
        CircuitParams {
            l: 4.1e-7,
            c: 1.6e-10,
            lengths: [5.6e-3, 6.8e-3, 4.1e-3],
            i_j0: 75.5e-6,
            phi_dc: 0.37,
            i_j: 30e-6,
            c_j: 0.5e-12,
            phi_ac_ca: 0.013,
            phi_ac_ba: 0.009,
            theta_ca: 0.0,
            theta_ba: 0.0,
        }
    }

    pub fn length(&self, tlr: Tlr) -> f64 {
        self.lengths[tlr.index()]
    }

    /// Phase velocity `1/√(lc)`, m/s.
    pub fn velocity(&self) -> f64 {
        1.0 / (self.l * self.c).sqrt()
    }

    /// Linearized SQUID inductance `φ0/I_J`, H.
    pub fn l_j(&self) -> f64 {
        REDUCED_FLUX_QUANTUM / self.i_j
    }

    /// Maximal Josephson energy `I_J0·φ0`, J.
    pub fn e_j0(&self) -> f64 {
        self.i_j0 * REDUCED_FLUX_QUANTUM
    }

    /// Effective Josephson energy `I_J·φ0`, J.
    pub fn e_j(&self) -> f64 {
        self.i_j * REDUCED_FLUX_QUANTUM
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("l", self.l),
            ("c", self.c),
            ("L_A", self.lengths[0]),
            ("L_B", self.lengths[1]),
            ("L_C", self.lengths[2]),
            ("I_J0", self.i_j0),
            ("I_J", self.i_j),
            ("C_J", self.c_j),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid(name, format!("must be finite and > 0, got {v}")));
            }
        }
        let finite = [
            ("Phi_dc", self.phi_dc),
            ("Phi_ac_CA", self.phi_ac_ca),
            ("Phi_ac_BA", self.phi_ac_ba),
            ("theta_CA", self.theta_ca),
            ("theta_BA", self.theta_ba),
        ];
        for (name, v) in finite {
            if !v.is_finite() {
                return Err(Error::invalid(name, format!("must be finite, got {v}")));
            }
        }
        if self.phi_ac_ca < 0.0 || self.phi_ac_ba < 0.0 {
            return Err(Error::invalid("Phi_ac", "a.c. amplitudes must be ≥ 0"));
        }
        Ok(())
    }

    /// Soft consistency checks; each entry describes one violated rule.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (name, amp) in [("Phi_ac_CA", self.phi_ac_ca), ("Phi_ac_BA", self.phi_ac_ba)] {
            if self.phi_dc != 0.0 && amp / self.phi_dc.abs() > 0.1 {
                out.push(format!("{name} = {amp} Φ0 is not small against Phi_dc = {} Φ0", self.phi_dc));
            }
        }
        let expected = self.i_j0 * (std::f64::consts::PI * self.phi_dc).cos();
        if (self.i_j - expected).abs() > 0.05 * expected.abs() {
            out.push(format!(
                "I_J = {:.4e} A differs from I_J0·cos(π·Phi_dc) = {expected:.4e} A by more than 5%",
                self.i_j
            ));
        }
        out
    }
}

/// Composite Simpson rule with `panels` (rounded up to even) subintervals.
pub(crate) fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let n = panels.max(2).next_multiple_of(2);
    let h = (b - a) / n as f64;
    let mut sum = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * f(a + h * i as f64);
    }
    sum * h / 3.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_device_is_self_consistent() {
        let p = CircuitParams::reference_device();
        p.validate().unwrap();
        assert!(p.warnings().is_empty(), "{:?}", p.warnings());
    }

    #[test]
    fn warnings_fire() {
        let p = CircuitParams { i_j: 10e-6, phi_ac_ba: 0.1, ..CircuitParams::reference_device() };
        assert_eq!(p.warnings().len(), 2);
    }

    #[test]
    fn invalid_params() {
        let p = CircuitParams { c_j: 0.0, ..CircuitParams::reference_device() };
        assert!(matches!(p.validate(), Err(Error::InvalidParameter { name: "C_J", .. })));
        let p = CircuitParams { phi_dc: f64::NAN, ..CircuitParams::reference_device() };
        assert!(p.validate().is_err());
    }

    #[test]
    fn simpson_is_exact_for_cubics() {
        let v = simpson(|x| x * x * x - 2.0 * x, 0.0, 2.0, 3);
        assert!((v - 0.0).abs() < 1e-14);
        let v = simpson(|x| x.sin().powi(2), 0.0, 1.0, 10_000);
        assert!((v - (0.5 - (2.0f64).sin() / 4.0)).abs() < 1e-14);
    }
}
