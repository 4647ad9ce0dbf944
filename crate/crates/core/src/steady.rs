//! Coherently pumped, uniformly damped steady state.
//!
//! In the frame rotating at the pump frequency the mean fields obey
//! `[B − (Ω_P + iκ/2)·I]·⟨a⟩ + P = 0`, a dense complex linear system.

use std::collections::BTreeSet;
use std::f64::consts::PI;

use nalgebra::DVector;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{build_lieb, ring_mode, LiebLatticeSpec, RealSpaceHamiltonian, RingModeKind, SiteIndex};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PumpKind {
    #[serde(rename = "single_b")]
    SingleB,
    Rm1,
    Rm2,
    Rm3,
}

impl PumpKind {
    pub const ALL: [PumpKind; 4] = [PumpKind::SingleB, PumpKind::Rm1, PumpKind::Rm2, PumpKind::Rm3];

    pub fn label(self) -> &'static str {
        match self {
            PumpKind::SingleB => "single_b",
            PumpKind::Rm1 => "rm1",
            PumpKind::Rm2 => "rm2",
            PumpKind::Rm3 => "rm3",
        }
    }
}

impl std::str::FromStr for PumpKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "single_b" | "single" => Ok(PumpKind::SingleB),
            "rm1" => Ok(PumpKind::Rm1),
            "rm2" => Ok(PumpKind::Rm2),
            "rm3" => Ok(PumpKind::Rm3),
            other => Err(Error::invalid("pump", format!("unknown pump kind `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PumpConfig {
    /// Drive amplitudes `P`, rad/s.
    pub pump: DVector<Complex64>,
    /// `Ω_P`, rad/s.
    pub detuning: f64,
    /// Uniform decay rate, rad/s.
    pub kappa: f64,
    /// Sites with `P ≠ 0`, sorted.
    pub support: Vec<SiteIndex>,
}

impl PumpConfig {
    /// Wraps an arbitrary drive vector; the support is read off its nonzeros.
    pub fn new(pump: DVector<Complex64>, kappa: f64, spec: &LiebLatticeSpec) -> Result<Self> {
        if !(kappa.is_finite() && kappa > 0.0) {
            return Err(Error::invalid("kappa", format!("must be finite and > 0, got {kappa}")));
        }
        if pump.len() != spec.dim() {
            return Err(Error::DimensionMismatch { expected: spec.dim(), found: pump.len() });
        }
        let support = pump
            .iter()
            .enumerate()
            .filter(|(_, z)| z.norm() > 0.0)
            .map(|(i, _)| SiteIndex::from_flat(i, spec.nx))
            .collect();
        Ok(PumpConfig { pump, detuning: 0.0, kappa, support })
    }

    pub fn with_detuning(mut self, detuning: f64) -> Self {
        self.detuning = detuning;
        self
    }

    /// The same drive multiplied by `alpha`.
    pub fn scaled(&self, alpha: Complex64) -> Self {
        let support = if alpha == Complex64::default() { Vec::new() } else { self.support.clone() };
        PumpConfig { pump: self.pump.map(|z| z * alpha), detuning: self.detuning, kappa: self.kappa, support }
    }
}

/// Drive of strength `t_p` shaped as a single B site or a ring mode anchored
/// at `anchor` (an A site). RM3 needs a lattice at θ = π/3.
pub fn make_pump(
    kind: PumpKind,
    anchor: SiteIndex,
    t_p: f64,
    kappa: f64,
    spec: &LiebLatticeSpec,
) -> Result<PumpConfig> {
    if !t_p.is_finite() {
        return Err(Error::invalid("T_P", format!("must be finite, got {t_p}")));
    }
    spec.validate()?;
    let shape = match kind {
        PumpKind::SingleB => {
            let site = anchor.with_sublattice(crate::lattice::Sublattice::B);
            let mut v = DVector::zeros(spec.dim());
            v[spec.flat(site)?] = Complex64::new(1.0, 0.0);
            v
        }
        PumpKind::Rm1 => ring_mode(RingModeKind::Rm1, anchor, spec)?.0,
        PumpKind::Rm2 => ring_mode(RingModeKind::Rm2, anchor, spec)?.0,
        PumpKind::Rm3 => ring_mode(RingModeKind::Rm3, anchor, spec)?.0,
    };
    PumpConfig::new(shape * Complex64::new(t_p, 0.0), kappa, spec)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SteadyStateResult {
    pub amplitudes: DVector<Complex64>,
    /// `|⟨a_j⟩|²` per site.
    pub sspn: Vec<f64>,
    /// `‖[B − (Ω_P + iκ/2)I]⟨a⟩ + P‖`, rad/s.
    pub residual: f64,
}

pub fn steady_state(h: &RealSpaceHamiltonian, cfg: &PumpConfig) -> Result<SteadyStateResult> {
    let dim = h.dim();
    if cfg.pump.len() != dim {
        return Err(Error::DimensionMismatch { expected: dim, found: cfg.pump.len() });
    }
    if !(cfg.kappa.is_finite() && cfg.kappa >= 0.0) || !cfg.detuning.is_finite() {
        return Err(Error::invalid("kappa", format!("need finite κ ≥ 0 and Ω_P, got {} and {}", cfg.kappa, cfg.detuning)));
    }
    let shift = Complex64::new(cfg.detuning, cfg.kappa / 2.0);
    let mut system = h.matrix().clone();
    for i in 0..dim {
        system[(i, i)] -= shift;
    }
    let rhs = -&cfg.pump;
    let singular = || Error::SingularSystem { kappa: cfg.kappa, detuning: cfg.detuning };
    let amplitudes = system.clone().lu().solve(&rhs).ok_or_else(singular)?;
    if amplitudes.iter().any(|z| !z.is_finite()) {
        return Err(singular());
    }
    let residual = (&system * &amplitudes - &rhs).norm();
    let pump_norm = cfg.pump.norm();
    if pump_norm > 0.0 && residual > 1e-10 * pump_norm {
        log::warn!("steady-state residual {residual:e} exceeds 1e-10·‖P‖ = {:e}", 1e-10 * pump_norm);
    }
    let sspn = amplitudes.iter().map(|z| z.norm_sqr()).collect();
    Ok(SteadyStateResult { amplitudes, sspn, residual })
}

/// Photons on the pump support over photons in every site of the support
/// cells and their von Neumann neighbour cells.
pub fn localization_factor(result: &SteadyStateResult, cfg: &PumpConfig, spec: &LiebLatticeSpec) -> Result<f64> {
    if result.sspn.len() != spec.dim() {
        return Err(Error::DimensionMismatch { expected: spec.dim(), found: result.sspn.len() });
    }
    let numerator: f64 = cfg.support.iter().map(|s| result.sspn[s.flat(spec.nx)]).sum();
    let mut cells = BTreeSet::new();
    for s in &cfg.support {
        cells.insert((s.m, s.n));
        for (dm, dn) in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
            if let Some(cell) = spec.shift(s.m, s.n, dm, dn) {
                cells.insert(cell);
            }
        }
    }
    let denominator: f64 = cells
        .iter()
        .flat_map(|&(m, n)| {
            let base = 3 * ((n - 1) * spec.nx + (m - 1));
            base..base + 3
        })
        .map(|i| result.sspn[i])
        .sum();
    if denominator <= 0.0 {
        return Err(Error::ZeroDenominator);
    }
    Ok(numerator / denominator)
}

/// Drive settings shared by every point of a localization sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPumps {
    pub anchor: SiteIndex,
    pub t_p: f64,
    pub kappa: f64,
    pub detuning: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    /// d.c. mixing strength `T_BC`, rad/s.
    pub tbc: f64,
    /// Next-nearest-neighbour hopping `T_BC²/(3Δ)`, rad/s.
    pub tprime: f64,
    /// Localization factors ordered as [`PumpKind::ALL`].
    pub lf: [f64; 4],
}

/// Localization factor of all four pumps versus `T_BC`. The single-site, RM1
/// and RM2 pumps use the θ = 0 lattice of `base`; RM3 uses θ = π/3.
pub fn localization_sweep(
    tbc_grid: &[f64],
    delta: f64,
    base: &LiebLatticeSpec,
    pumps: &SweepPumps,
) -> Result<Vec<SweepRow>> {
    if tbc_grid.is_empty() {
        return Err(Error::invalid("tbc_grid", "must contain at least one value"));
    }
    if !(delta.is_finite() && delta > 0.0) {
        return Err(Error::invalid("delta", format!("must be finite and > 0, got {delta}")));
    }
    tbc_grid
        .par_iter()
        .map(|&tbc| {
            let tprime = tbc * tbc / (3.0 * delta);
            let flat = LiebLatticeSpec { nnn_tprime: tprime, gauge_theta: 0.0, ..*base };
            let gauged = flat.with_gauge(PI / 3.0);
            let h_flat = build_lieb(&flat)?;
            let h_gauged = build_lieb(&gauged)?;
            let mut lf = [0.0; 4];
            for (slot, kind) in PumpKind::ALL.into_iter().enumerate() {
                let (spec, h) = if kind == PumpKind::Rm3 { (&gauged, &h_gauged) } else { (&flat, &h_flat) };
                let cfg = make_pump(kind, pumps.anchor, pumps.t_p, pumps.kappa, spec)?.with_detuning(pumps.detuning);
                let result = steady_state(h, &cfg)?;
                lf[slot] = localization_factor(&result, &cfg, spec)?;
            }
            Ok(SweepRow { tbc, tprime, lf })
        })
        .collect()
}
