//! Run configuration read from a sectioned TOML file.
//!
//! Every physical key carries its unit in the name (`T_MHz`, `L_A_mm`, ...).
//! Missing keys fall back to the representative device and the default
//! pumping experiment; unknown keys are rejected.

use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::circuit::CircuitParams;
use crate::error::{Error, Result};
use crate::hofstadter::linspace;
use crate::lattice::{Boundary, LiebLatticeSpec, SiteIndex};
use crate::steady::{PumpKind, SweepPumps};
use crate::units::{ghz_to_angular, khz_to_angular, mhz_to_angular};

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub lattice: LatticeSection,
    pub bands: BandsSection,
    pub butterfly: ButterflySection,
    pub pump: PumpSection,
    pub sweep: SweepSection,
    pub circuit: CircuitSection,
    pub noise: NoiseSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LatticeSection {
    pub nx: usize,
    pub ny: usize,
    #[serde(rename = "T_MHz")]
    pub t_mhz: f64,
    /// Gauge phase θ in units of π; each plaquette encloses `2θ`.
    pub theta_over_pi: f64,
    #[serde(rename = "tprime_MHz")]
    pub tprime_mhz: f64,
    pub boundary: Boundary,
}

impl Default for LatticeSection {
    fn default() -> Self {
        LatticeSection { nx: 12, ny: 12, t_mhz: 10.0, theta_over_pi: 0.0, tprime_mhz: 0.6, boundary: Boundary::Open }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BandsSection {
    pub nk: usize,
}

impl Default for BandsSection {
    fn default() -> Self {
        BandsSection { nk: 64 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ButterflySection {
    pub theta_from_over_pi: f64,
    pub theta_to_over_pi: f64,
    pub theta_points: usize,
    /// Half-width of the middle-cluster window; `None` means `5·t′`, or
    /// `0.1·T` on an ideal lattice.
    #[serde(rename = "window_MHz")]
    pub window_mhz: Option<f64>,
    pub dim_cap: usize,
}

impl Default for ButterflySection {
    fn default() -> Self {
        ButterflySection {
            theta_from_over_pi: 0.0,
            theta_to_over_pi: 1.0,
            theta_points: 201,
            window_mhz: None,
            dim_cap: crate::hofstadter::DEFAULT_DIM_CAP,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PumpSection {
    pub kind: PumpKind,
    pub anchor_m: usize,
    pub anchor_n: usize,
    #[serde(rename = "T_P_MHz")]
    pub t_p_mhz: f64,
    #[serde(rename = "kappa_kHz")]
    pub kappa_khz: f64,
    #[serde(rename = "Omega_P_MHz")]
    pub omega_p_mhz: f64,
}

impl Default for PumpSection {
    fn default() -> Self {
        PumpSection { kind: PumpKind::Rm1, anchor_m: 6, anchor_n: 6, t_p_mhz: 1.0, kappa_khz: 100.0, omega_p_mhz: 0.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSection {
    #[serde(rename = "tbc_from_MHz")]
    pub tbc_from_mhz: f64,
    #[serde(rename = "tbc_to_MHz")]
    pub tbc_to_mhz: f64,
    pub points: usize,
    #[serde(rename = "Delta_GHz")]
    pub delta_ghz: f64,
}

impl Default for SweepSection {
    fn default() -> Self {
        SweepSection { tbc_from_mhz: 0.0, tbc_to_mhz: 80.0, points: 17, delta_ghz: 2.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
#[allow(non_snake_case)]
pub struct CircuitSection {
    pub l_H_per_m: f64,
    pub c_F_per_m: f64,
    pub L_A_mm: f64,
    pub L_B_mm: f64,
    pub L_C_mm: f64,
    pub I_J0_uA: f64,
    pub Phi_dc_Phi0: f64,
    pub I_J_uA: f64,
    pub C_J_pF: f64,
    pub Phi_ac_CA_Phi0: f64,
    pub Phi_ac_BA_Phi0: f64,
    pub theta_CA_rad: f64,
    pub theta_BA_rad: f64,
    /// Detuning Δ between neighbouring modes, used for `ω_p/Δ` and `t′`.
    pub Delta_GHz: f64,
    /// Reference hopping the a.c. amplitudes are compared against.
    pub target_T_MHz: f64,
}

impl Default for CircuitSection {
    fn default() -> Self {
        let p = CircuitParams::reference_device();
        CircuitSection {
            l_H_per_m: p.l,
            c_F_per_m: p.c,
            L_A_mm: p.lengths[0] * 1e3,
            L_B_mm: p.lengths[1] * 1e3,
            L_C_mm: p.lengths[2] * 1e3,
            I_J0_uA: p.i_j0 * 1e6,
            Phi_dc_Phi0: p.phi_dc,
            I_J_uA: p.i_j * 1e6,
            C_J_pF: p.c_j * 1e12,
            Phi_ac_CA_Phi0: p.phi_ac_ca,
            Phi_ac_BA_Phi0: p.phi_ac_ba,
            theta_CA_rad: p.theta_ca,
            theta_BA_rad: p.theta_ba,
            Delta_GHz: 2.0,
            target_T_MHz: 10.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
#[allow(non_snake_case)]
pub struct NoiseSection {
    /// Spectral cutoffs as ordinary frequencies.
    pub f_min_Hz: f64,
    pub f_max_Hz: f64,
    /// Range of quasi-static bias offsets δΦ/Φ0.
    pub flux_dPhi_min_Phi0: f64,
    pub flux_dPhi_max_Phi0: f64,
    /// Range of the critical-current 1/f amplitude A_I/I_J0; offsets are
    /// taken at the `5·A` bound.
    pub current_A_min: f64,
    pub current_A_max: f64,
}

impl Default for NoiseSection {
    fn default() -> Self {
        NoiseSection {
            f_min_Hz: 1.0,
            f_max_Hz: 1e9,
            flux_dPhi_min_Phi0: 1e-5,
            flux_dPhi_max_Phi0: 1e-4,
            current_A_min: 1e-7,
            current_A_max: 1e-6,
        }
    }
}

fn config_error(key: &str, reason: impl Into<String>) -> Error {
    Error::Config { key: key.to_string(), reason: reason.into() }
}

fn positive(key: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(config_error(key, format!("must be finite and > 0, got {v}")))
    }
}

fn non_negative(key: &str, v: f64) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(config_error(key, format!("must be finite and ≥ 0, got {v}")))
    }
}

/// `section.key` at the byte offset a parser error points to.
fn key_at(text: &str, offset: usize) -> Option<String> {
    let line_start = text[..offset.min(text.len())].rfind('\n').map_or(0, |i| i + 1);
    let line = text[line_start..].lines().next()?;
    let key = line.split('=').next()?.trim();
    if key.is_empty() || key.starts_with('[') || !line.contains('=') {
        return None;
    }
    let section = text[..line_start]
        .lines()
        .rev()
        .map(str::trim)
        .find(|l| l.starts_with('[') && l.ends_with(']'))
        .map(|l| l.trim_matches(|c| c == '[' || c == ']').trim().to_string());
    Some(match section {
        Some(s) => format!("{s}.{key}"),
        None => key.to_string(),
    })
}

/// First backtick-quoted word of a parser message.
fn quoted_word(message: &str) -> Option<String> {
    let start = message.find('`')? + 1;
    let len = message[start..].find('`')?;
    Some(message[start..start + len].to_string())
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| {
            let key = e
                .span()
                .and_then(|span| key_at(text, span.start))
                .or_else(|| quoted_word(e.message()))
                .unwrap_or_else(|| "<file>".into());
            config_error(&key, e.to_string().trim_end())
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config_error("<file>", format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config is always serializable")
    }

    /// Checks every key and names the first bad one as `section.key`.
    pub fn validate(&self) -> Result<()> {
        let lat = &self.lattice;
        if lat.nx < 1 {
            return Err(config_error("lattice.nx", "must be ≥ 1"));
        }
        if lat.ny < 1 {
            return Err(config_error("lattice.ny", "must be ≥ 1"));
        }
        non_negative("lattice.T_MHz", lat.t_mhz)?;
        non_negative("lattice.tprime_MHz", lat.tprime_mhz)?;
        if !(lat.theta_over_pi.is_finite() && (0.0..2.0).contains(&lat.theta_over_pi)) {
            return Err(config_error("lattice.theta_over_pi", format!("must lie in [0, 2), got {}", lat.theta_over_pi)));
        }
        if self.bands.nk < 2 {
            return Err(config_error("bands.nk", format!("must be ≥ 2, got {}", self.bands.nk)));
        }
        let bf = &self.butterfly;
        if bf.theta_points < 1 {
            return Err(config_error("butterfly.theta_points", "must be ≥ 1"));
        }
        for (key, v) in [("butterfly.theta_from_over_pi", bf.theta_from_over_pi), ("butterfly.theta_to_over_pi", bf.theta_to_over_pi)] {
            if !v.is_finite() {
                return Err(config_error(key, format!("must be finite, got {v}")));
            }
        }
        if let Some(w) = bf.window_mhz {
            positive("butterfly.window_MHz", w)?;
        }
        let pump = &self.pump;
        if !(1..=lat.nx).contains(&pump.anchor_m) {
            return Err(config_error("pump.anchor_m", format!("must lie in 1..={}, got {}", lat.nx, pump.anchor_m)));
        }
        if !(1..=lat.ny).contains(&pump.anchor_n) {
            return Err(config_error("pump.anchor_n", format!("must lie in 1..={}, got {}", lat.ny, pump.anchor_n)));
        }
        non_negative("pump.T_P_MHz", pump.t_p_mhz)?;
        positive("pump.kappa_kHz", pump.kappa_khz)?;
        if !pump.omega_p_mhz.is_finite() {
            return Err(config_error("pump.Omega_P_MHz", "must be finite"));
        }
        let sw = &self.sweep;
        non_negative("sweep.tbc_from_MHz", sw.tbc_from_mhz)?;
        non_negative("sweep.tbc_to_MHz", sw.tbc_to_mhz)?;
        if sw.points < 1 {
            return Err(config_error("sweep.points", "must be ≥ 1"));
        }
        positive("sweep.Delta_GHz", sw.delta_ghz)?;
        let c = &self.circuit;
        for (key, v) in [
            ("circuit.l_H_per_m", c.l_H_per_m),
            ("circuit.c_F_per_m", c.c_F_per_m),
            ("circuit.L_A_mm", c.L_A_mm),
            ("circuit.L_B_mm", c.L_B_mm),
            ("circuit.L_C_mm", c.L_C_mm),
            ("circuit.I_J0_uA", c.I_J0_uA),
            ("circuit.I_J_uA", c.I_J_uA),
            ("circuit.C_J_pF", c.C_J_pF),
            ("circuit.Delta_GHz", c.Delta_GHz),
            ("circuit.target_T_MHz", c.target_T_MHz),
        ] {
            positive(key, v)?;
        }
        non_negative("circuit.Phi_ac_CA_Phi0", c.Phi_ac_CA_Phi0)?;
        non_negative("circuit.Phi_ac_BA_Phi0", c.Phi_ac_BA_Phi0)?;
        for (key, v) in [
            ("circuit.Phi_dc_Phi0", c.Phi_dc_Phi0),
            ("circuit.theta_CA_rad", c.theta_CA_rad),
            ("circuit.theta_BA_rad", c.theta_BA_rad),
        ] {
            if !v.is_finite() {
                return Err(config_error(key, format!("must be finite, got {v}")));
            }
        }
        let n = &self.noise;
        positive("noise.f_min_Hz", n.f_min_Hz)?;
        positive("noise.f_max_Hz", n.f_max_Hz)?;
        if n.f_max_Hz <= n.f_min_Hz {
            return Err(config_error("noise.f_max_Hz", "must exceed noise.f_min_Hz"));
        }
        for (key, v) in [
            ("noise.flux_dPhi_min_Phi0", n.flux_dPhi_min_Phi0),
            ("noise.flux_dPhi_max_Phi0", n.flux_dPhi_max_Phi0),
            ("noise.current_A_min", n.current_A_min),
            ("noise.current_A_max", n.current_A_max),
        ] {
            non_negative(key, v)?;
        }
        if n.flux_dPhi_max_Phi0 < n.flux_dPhi_min_Phi0 {
            return Err(config_error("noise.flux_dPhi_max_Phi0", "must be ≥ noise.flux_dPhi_min_Phi0"));
        }
        if n.current_A_max < n.current_A_min {
            return Err(config_error("noise.current_A_max", "must be ≥ noise.current_A_min"));
        }
        Ok(())
    }

    /// Lattice with hopping, gauge and NNN strength in rad/s.
    pub fn lattice_spec(&self) -> LiebLatticeSpec {
        let lat = &self.lattice;
        LiebLatticeSpec::new(lat.nx, lat.ny, mhz_to_angular(lat.t_mhz))
            .with_gauge(lat.theta_over_pi * PI)
            .with_nnn(mhz_to_angular(lat.tprime_mhz))
            .with_boundary(lat.boundary)
    }

    pub fn anchor(&self) -> SiteIndex {
        SiteIndex::a(self.pump.anchor_m, self.pump.anchor_n)
    }

    pub fn sweep_pumps(&self) -> SweepPumps {
        SweepPumps {
            anchor: self.anchor(),
            t_p: mhz_to_angular(self.pump.t_p_mhz),
            kappa: khz_to_angular(self.pump.kappa_khz),
            detuning: mhz_to_angular(self.pump.omega_p_mhz),
        }
    }

    /// `T_BC` grid, rad/s.
    pub fn tbc_grid(&self) -> Vec<f64> {
        linspace(self.sweep.tbc_from_mhz, self.sweep.tbc_to_mhz, self.sweep.points)
            .into_iter()
            .map(mhz_to_angular)
            .collect()
    }

    pub fn sweep_delta(&self) -> f64 {
        ghz_to_angular(self.sweep.delta_ghz)
    }

    /// Gauge phases θ, rad.
    pub fn theta_grid(&self) -> Vec<f64> {
        let bf = &self.butterfly;
        linspace(bf.theta_from_over_pi, bf.theta_to_over_pi, bf.theta_points).into_iter().map(|x| x * PI).collect()
    }

    pub fn circuit_params(&self) -> CircuitParams {
        let c = &self.circuit;
        CircuitParams {
            l: c.l_H_per_m,
            c: c.c_F_per_m,
            lengths: [c.L_A_mm * 1e-3, c.L_B_mm * 1e-3, c.L_C_mm * 1e-3],
            i_j0: c.I_J0_uA * 1e-6,
            phi_dc: c.Phi_dc_Phi0,
            i_j: c.I_J_uA * 1e-6,
            c_j: c.C_J_pF * 1e-12,
            phi_ac_ca: c.Phi_ac_CA_Phi0,
            phi_ac_ba: c.Phi_ac_BA_Phi0,
            theta_ca: c.theta_CA_rad,
            theta_ba: c.theta_BA_rad,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        let cfg = RunConfig::from_toml_str("").unwrap();
        assert_eq!(cfg, RunConfig::default());
        let (a, b) = (cfg.circuit_params(), CircuitParams::reference_device());
        let close = |x: f64, y: f64| (x - y).abs() <= 1e-15 * y.abs();
        assert!(close(a.l, b.l) && close(a.c, b.c) && close(a.i_j0, b.i_j0) && close(a.i_j, b.i_j) && close(a.c_j, b.c_j));
        assert!((0..3).all(|i| close(a.lengths[i], b.lengths[i])));
        assert_eq!((a.phi_dc, a.phi_ac_ca, a.phi_ac_ba), (b.phi_dc, b.phi_ac_ca, b.phi_ac_ba));
        let spec = cfg.lattice_spec();
        assert_eq!((spec.nx, spec.ny), (12, 12));
        assert!((spec.hopping - mhz_to_angular(10.0)).abs() < 1e-6);
        assert_eq!(cfg.tbc_grid().len(), 17);
        assert_eq!(cfg.theta_grid().len(), 201);
    }

    #[test]
    fn overrides_and_round_trip() {
        let text = "[lattice]\nnx = 4\nT_MHz = 5.0\nboundary = \"periodic\"\n[pump]\nkind = \"rm3\"\nanchor_m = 2\nanchor_n = 2\n";
        let cfg = RunConfig::from_toml_str(text).unwrap();
        assert_eq!(cfg.lattice.nx, 4);
        assert_eq!(cfg.lattice.boundary, Boundary::Periodic);
        assert_eq!(cfg.pump.kind, PumpKind::Rm3);
        let again = RunConfig::from_toml_str(&cfg.to_toml_string()).unwrap();
        assert_eq!(again, cfg);
    }

    #[test]
    fn unknown_key_is_named() {
        let err = RunConfig::from_toml_str("[lattice]\nnxx = 3\n").unwrap_err();
        match err {
            Error::Config { key, .. } => assert_eq!(key, "lattice.nxx"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn bad_values_are_named() {
        let cases = [
            ("[lattice]\nnx = 0\n", "lattice.nx"),
            ("[pump]\nkappa_kHz = -1.0\n", "pump.kappa_kHz"),
            ("[pump]\nanchor_m = 13\n", "pump.anchor_m"),
            ("[circuit]\nC_J_pF = 0.0\n", "circuit.C_J_pF"),
            ("[noise]\nf_max_Hz = 0.5\n", "noise.f_max_Hz"),
            ("[bands]\nnk = 1\n", "bands.nk"),
        ];
        for (text, expected) in cases {
            match RunConfig::from_toml_str(text).unwrap_err() {
                Error::Config { key, .. } => assert_eq!(key, expected, "{text}"),
                other => panic!("unexpected {other:?}"),
            }
        }
    }

    #[test]
    fn wrong_type_is_reported() {
        match RunConfig::from_toml_str("[lattice]\nny = 3\nnx = \"big\"\n").unwrap_err() {
            Error::Config { key, .. } => assert_eq!(key, "lattice.nx"),
            other => panic!("unexpected {other:?}"),
        }
    }
}
