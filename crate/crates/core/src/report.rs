//! Serializable summaries of the circuit layer, in ordinary-frequency units.

#![allow(non_snake_case)]

use serde::{Deserialize, Serialize};

use crate::circuit::{
    amplitude_for_strength, critical_current_noise_disturbance, dc_mixing, esr, flux_noise_disturbance,
    fourth_order_energy, fourth_order_ratio, noise_variance, parametric_strength, plasma_frequency, solve_eigenmodes,
    CircuitParams, Disturbance, EigenmodeSolution, NoiseBudget, NoiseSpec, ParametricPair, Tlr,
};
use crate::error::Result;
use crate::units::{angular_to_ghz, angular_to_mhz, ghz_to_angular, mhz_to_angular};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeEntry {
    pub mode: Tlr,
    pub frequency_GHz: f64,
    pub k_per_m: f64,
    pub phi_over_phi0: f64,
    /// Energy-storing ratio in resonators A, B, C.
    pub esr: [f64; 3],
    pub fourth_order_Hz: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairEntry {
    pub pair: String,
    pub value_MHz: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParametricEntry {
    pub pair: String,
    pub amplitude_Phi0: f64,
    pub strength_MHz: f64,
    pub phase_rad: f64,
    pub target_MHz: f64,
    /// a.c. amplitude the same formula needs to reach `target_MHz`.
    pub amplitude_for_target_Phi0: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircuitReport {
    pub modes: Vec<ModeEntry>,
    pub ascending_frequencies_GHz: [f64; 3],
    pub dc_mixing: Vec<PairEntry>,
    pub fourth_order_ratio: f64,
    /// `T_BC²/(3Δ)` from the computed B–C mixing.
    pub tprime_from_dc_MHz: f64,
    pub parametric: Vec<ParametricEntry>,
    pub plasma_frequency_GHz: f64,
    pub plasma_over_delta: f64,
    pub orthonormality_residual: f64,
    pub kirchhoff_residual: f64,
    pub warnings: Vec<String>,
}

impl CircuitReport {
    /// `delta` is the mode detuning Δ and `target` the hopping the a.c.
    /// tones are meant to produce, both rad/s.
    pub fn compute(p: &CircuitParams, delta: f64, target: f64) -> Result<Self> {
        let sol = solve_eigenmodes(p)?;
        Self::from_solution(&sol, p, delta, target)
    }

    pub fn from_solution(sol: &EigenmodeSolution, p: &CircuitParams, delta: f64, target: f64) -> Result<Self> {
        let ratios = sol.phi_over_phi0();
        let modes = Tlr::ALL
            .iter()
            .map(|&m| ModeEntry {
                mode: m,
                frequency_GHz: angular_to_ghz(sol.omega[m.index()]),
                k_per_m: sol.k[m.index()],
                phi_over_phi0: ratios[m.index()],
                esr: Tlr::ALL.map(|a| esr(sol, p, m, a)),
                fourth_order_Hz: angular_to_mhz(fourth_order_energy(sol, p, m)) * 1e6,
            })
            .collect();
        let v = p.velocity();
        let ascending_frequencies_GHz = sol.ascending_k.map(|k| angular_to_ghz(v * k));
        let mut dc = Vec::new();
        for (m, n) in [(Tlr::A, Tlr::B), (Tlr::A, Tlr::C), (Tlr::B, Tlr::C)] {
            dc.push(PairEntry { pair: format!("{m}{n}"), value_MHz: angular_to_mhz(dc_mixing(sol, p, m, n)?) });
        }
        let t_bc = dc_mixing(sol, p, Tlr::B, Tlr::C)?;
        let mut parametric = Vec::new();
        for pair in ParametricPair::ALL {
            let hop = parametric_strength(sol, p, pair);
            let needed = amplitude_for_strength(sol, p, pair, target).unwrap_or(f64::NAN);
            parametric.push(ParametricEntry {
                pair: pair.label().to_string(),
                amplitude_Phi0: pair.amplitude(p),
                strength_MHz: angular_to_mhz(hop.strength),
                phase_rad: hop.phase,
                target_MHz: angular_to_mhz(target),
                amplitude_for_target_Phi0: needed,
            });
        }
        let wp = plasma_frequency(p);
        Ok(CircuitReport {
            modes,
            ascending_frequencies_GHz,
            dc_mixing: dc,
            fourth_order_ratio: fourth_order_ratio(sol, p),
            tprime_from_dc_MHz: angular_to_mhz(t_bc * t_bc / (3.0 * delta)),
            parametric,
            plasma_frequency_GHz: angular_to_ghz(wp),
            plasma_over_delta: wp / delta,
            orthonormality_residual: sol.orthonormality_residual(p),
            kirchhoff_residual: sol.kirchhoff_residual(p),
            warnings: p.warnings(),
        })
    }

    /// Defaults: Δ/2π = 2 GHz, target hopping 2π×10 MHz.
    pub fn reference_device() -> Result<Self> {
        Self::compute(&CircuitParams::reference_device(), ghz_to_angular(2.0), mhz_to_angular(10.0))
    }
}

/// Input range and resulting disturbance ranges, MHz.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DisturbanceRange {
    /// Offsets fed into the first-order propagation (Φ0 or relative).
    pub input_range: [f64; 2],
    /// Smallest and largest `|δω|/2π` over modes and both input endpoints.
    pub delta_omega_MHz: [f64; 2],
    /// Same for `|δT|/2π` over the two parametric bonds.
    pub delta_T_MHz: [f64; 2],
    /// Worst case relative to the reference hopping.
    pub delta_omega_over_T: f64,
    pub delta_T_over_T: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseReport {
    pub cutoffs_Hz: [f64; 2],
    /// Variance per unit amplitude squared, `ln(ω_max/ω_min)`.
    pub log_bandwidth: f64,
    pub flux: DisturbanceRange,
    pub critical_current: DisturbanceRange,
    /// Budget for the largest critical-current amplitude.
    pub current_budget: NoiseBudget,
}

fn span(ds: &[Disturbance], hopping: f64, input_range: [f64; 2]) -> DisturbanceRange {
    let fold = |vals: Vec<f64>| vals.iter().fold((f64::INFINITY, 0.0_f64), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let (w_lo, w_hi) = fold(ds.iter().flat_map(|d| d.delta_omega.map(f64::abs)).collect());
    let (t_lo, t_hi) = fold(ds.iter().flat_map(|d| d.delta_hopping.map(f64::abs)).collect());
    DisturbanceRange {
        input_range,
        delta_omega_MHz: [angular_to_mhz(w_lo), angular_to_mhz(w_hi)],
        delta_T_MHz: [angular_to_mhz(t_lo), angular_to_mhz(t_hi)],
        delta_omega_over_T: w_hi / hopping,
        delta_T_over_T: t_hi / hopping,
    }
}

/// Ranges of the quasi-static offsets the noise report propagates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseScenario {
    pub f_min_hz: f64,
    pub f_max_hz: f64,
    /// δΦ/Φ0 endpoints.
    pub flux_offsets: [f64; 2],
    /// 1/f amplitude A_I/I_J0 endpoints; offsets are `5·A`.
    pub current_amplitudes: [f64; 2],
}

impl Default for NoiseScenario {
    fn default() -> Self {
        NoiseScenario { f_min_hz: 1.0, f_max_hz: 1e9, flux_offsets: [1e-5, 1e-4], current_amplitudes: [1e-7, 1e-6] }
    }
}

impl NoiseReport {
    /// `hopping` is the reference lattice hopping T, rad/s.
    pub fn compute(p: &CircuitParams, scenario: &NoiseScenario, hopping: f64) -> Result<Self> {
        let sol = solve_eigenmodes(p)?;
        Self::from_solution(&sol, p, scenario, hopping)
    }

    pub fn from_solution(sol: &EigenmodeSolution, p: &CircuitParams, scenario: &NoiseScenario, hopping: f64) -> Result<Self> {
        let tau = std::f64::consts::TAU;
        let spec = |amplitude| NoiseSpec {
            amplitude,
            omega_min: tau * scenario.f_min_hz,
            omega_max: tau * scenario.f_max_hz,
        };
        let unit = noise_variance(&spec(1.0))?;
        let current_budget = noise_variance(&spec(scenario.current_amplitudes[1]))?;
        let flux: Vec<Disturbance> =
            scenario.flux_offsets.iter().map(|&d| flux_noise_disturbance(sol, p, d)).collect();
        let [a_lo, a_hi] = scenario.current_amplitudes;
        let offsets = [noise_variance(&spec(a_lo))?.range_bound, noise_variance(&spec(a_hi))?.range_bound];
        let current: Vec<Disturbance> =
            offsets.iter().map(|&d| critical_current_noise_disturbance(sol, p, d)).collect();
        Ok(NoiseReport {
            cutoffs_Hz: [scenario.f_min_hz, scenario.f_max_hz],
            log_bandwidth: unit.variance,
            flux: span(&flux, hopping, scenario.flux_offsets),
            critical_current: span(&current, hopping, offsets),
            current_budget,
        })
    }
}
