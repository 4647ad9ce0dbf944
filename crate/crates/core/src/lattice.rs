//! Real-space Lieb lattice with complex nearest-neighbour hoppings, Landau
//! gauge Peierls phases and the two diagonal next-nearest-neighbour channels.
//!
//! Geometry: unit cell `(m, n)` (1-based) holds the corner site `A` at the
//! integer point `(m, n)`, the horizontal edge site `B` at `(m - 1/2, n)` and
//! the vertical edge site `C` at `(m, n + 1/2)`. Hence `A[m,n]` bonds to
//! `B[m,n]`, `B[m+1,n]`, `C[m,n]` and `C[m,n-1]`, and the plaquette whose
//! lower-left corner is `A[m,n]` is bounded by `B[m+1,n]`, `C[m+1,n]`,
//! `B[m+1,n+1]` and `C[m,n]`.
//!
//! Matrix convention: a hop `from -> to` with amplitude `t·e^{iφ}` sets
//! `H[to, from] = t·e^{iφ}` and `H[from, to]` to its conjugate, so that
//! `a† H a` reproduces the hopping Hamiltonian.

use std::collections::HashMap;
use std::f64::consts::{PI, TAU};
use std::fmt;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;

/// Relative tolerance used for flux quantization and the RM3 gauge check.
const PHASE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sublattice {
    A,
    B,
    C,
}

impl Sublattice {
    pub const ALL: [Sublattice; 3] = [Sublattice::A, Sublattice::B, Sublattice::C];

    pub fn ordinal(self) -> usize {
        match self {
            Sublattice::A => 0,
            Sublattice::B => 1,
            Sublattice::C => 2,
        }
    }

    pub fn from_ordinal(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }

    pub fn label(self) -> char {
        match self {
            Sublattice::A => 'A',
            Sublattice::B => 'B',
            Sublattice::C => 'C',
        }
    }
}

impl fmt::Display for Sublattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

/// A lattice site: unit-cell column `m`, row `n` (both 1-based) and sublattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SiteIndex {
    pub m: usize,
    pub n: usize,
    pub sublattice: Sublattice,
}

impl SiteIndex {
    pub const fn new(m: usize, n: usize, sublattice: Sublattice) -> Self {
        SiteIndex { m, n, sublattice }
    }

    pub const fn a(m: usize, n: usize) -> Self {
        Self::new(m, n, Sublattice::A)
    }

    pub const fn b(m: usize, n: usize) -> Self {
        Self::new(m, n, Sublattice::B)
    }

    pub const fn c(m: usize, n: usize) -> Self {
        Self::new(m, n, Sublattice::C)
    }

    /// Flat index `3·((n−1)·nx + (m−1)) + ordinal`. The caller guarantees the
    /// site lies inside an `nx`-wide lattice.
    pub fn flat(&self, nx: usize) -> usize {
        3 * ((self.n - 1) * nx + (self.m - 1)) + self.sublattice.ordinal()
    }

    pub fn from_flat(index: usize, nx: usize) -> Self {
        let cell = index / 3;
        let sublattice = Sublattice::from_ordinal(index % 3).expect("index % 3 < 3");
        SiteIndex { m: cell % nx + 1, n: cell / nx + 1, sublattice }
    }

    /// The same unit cell, different sublattice.
    pub fn with_sublattice(self, sublattice: Sublattice) -> Self {
        SiteIndex { sublattice, ..self }
    }
}

impl fmt::Display for SiteIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{},{}]", self.sublattice, self.m, self.n)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    #[default]
    Open,
    Periodic,
}

/// Everything needed to assemble the lattice Hamiltonian.
///
/// Frequencies are angular (rad/s). `gauge_theta` is the Peierls phase per
/// half horizontal bond per row; each plaquette then encloses flux `2θ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LiebLatticeSpec {
    pub nx: usize,
    pub ny: usize,
    pub hopping: f64,
    pub gauge_theta: f64,
    pub nnn_tprime: f64,
    pub boundary: Boundary,
}

impl LiebLatticeSpec {
    pub fn new(nx: usize, ny: usize, hopping: f64) -> Self {
        LiebLatticeSpec { nx, ny, hopping, gauge_theta: 0.0, nnn_tprime: 0.0, boundary: Boundary::Open }
    }

    pub fn with_gauge(mut self, theta: f64) -> Self {
        self.gauge_theta = theta;
        self
    }

    pub fn with_nnn(mut self, tprime: f64) -> Self {
        self.nnn_tprime = tprime;
        self
    }

    pub fn with_boundary(mut self, boundary: Boundary) -> Self {
        self.boundary = boundary;
        self
    }

    pub fn dim(&self) -> usize {
        3 * self.nx * self.ny
    }

    pub fn validate(&self) -> Result<()> {
        if self.nx < 1 || self.ny < 1 {
            return Err(Error::EmptyLattice { nx: self.nx, ny: self.ny });
        }
        if !(self.hopping.is_finite() && self.hopping >= 0.0) {
            return Err(Error::invalid("hopping", format!("must be finite and ≥ 0, got {}", self.hopping)));
        }
        if !(self.nnn_tprime.is_finite() && self.nnn_tprime >= 0.0) {
            return Err(Error::invalid("nnn_tprime", format!("must be finite and ≥ 0, got {}", self.nnn_tprime)));
        }
        if !(self.gauge_theta.is_finite() && (0.0..TAU).contains(&self.gauge_theta)) {
            return Err(Error::invalid("gauge_theta", format!("must lie in [0, 2π), got {}", self.gauge_theta)));
        }
        if self.boundary == Boundary::Periodic {
            let total_flux = 2.0 * self.gauge_theta * (self.nx * self.ny) as f64;
            let quanta = total_flux / TAU;
            if (quanta - quanta.round()).abs() > PHASE_TOLERANCE * quanta.abs().max(1.0) {
                return Err(Error::FluxQuantization {
                    nx: self.nx,
                    ny: self.ny,
                    theta: self.gauge_theta,
                    total_flux,
                });
            }
        }
        Ok(())
    }

    pub fn contains(&self, site: SiteIndex) -> bool {
        (1..=self.nx).contains(&site.m) && (1..=self.ny).contains(&site.n)
    }

    pub fn flat(&self, site: SiteIndex) -> Result<usize> {
        if self.contains(site) {
            Ok(site.flat(self.nx))
        } else {
            Err(Error::SiteOutOfRange { site, nx: self.nx, ny: self.ny })
        }
    }

    /// Cell `(m + dm, n + dn)`, wrapped for periodic boundaries and `None`
    /// when it falls off an open edge.
    pub fn shift(&self, m: usize, n: usize, dm: isize, dn: isize) -> Option<(usize, usize)> {
        let wrap = |v: usize, d: isize, len: usize| -> Option<usize> {
            let t = v as isize + d;
            if (1..=len as isize).contains(&t) {
                Some(t as usize)
            } else if self.boundary == Boundary::Periodic {
                Some(((t - 1).rem_euclid(len as isize) + 1) as usize)
            } else {
                None
            }
        };
        Some((wrap(m, dm, self.nx)?, wrap(n, dn, self.ny)?))
    }

    fn shifted_site(&self, site: SiteIndex, dm: isize, dn: isize, sub: Sublattice) -> Option<SiteIndex> {
        self.shift(site.m, site.n, dm, dn).map(|(m, n)| SiteIndex::new(m, n, sub))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum HoppingKind {
    Nearest,
    NextNearest,
}

/// One directed hop; the Hamiltonian adds its Hermitian conjugate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HoppingTerm {
    pub from: SiteIndex,
    pub to: SiteIndex,
    /// rad/s; negative for the B–B diagonal channel.
    pub strength: f64,
    pub phase: f64,
    pub kind: HoppingKind,
}

impl HoppingTerm {
    pub fn amplitude(&self) -> Complex64 {
        Complex64::from_polar(self.strength, self.phase)
    }

    pub fn conjugate(&self) -> HoppingTerm {
        HoppingTerm { from: self.to, to: self.from, phase: -self.phase, ..*self }
    }
}

/// Enumerates every hop of the lattice exactly once (conjugates implied).
pub fn lieb_hoppings(spec: &LiebLatticeSpec) -> Vec<HoppingTerm> {
    let t = spec.hopping;
    let theta = spec.gauge_theta;
    let periodic = spec.boundary == Boundary::Periodic;
    let mut terms = Vec::with_capacity(6 * spec.nx * spec.ny);
    let nn = |from, to, phase| HoppingTerm { from, to, strength: t, phase, kind: HoppingKind::Nearest };

    for n in 1..=spec.ny {
        // Eastward half-bonds in row n carry −θ·n (A_x = −θ n).
        let east_phase = -theta * n as f64;
        for m in 1..=spec.nx {
            let a = SiteIndex::a(m, n);
            let c = SiteIndex::c(m, n);
            terms.push(nn(SiteIndex::b(m, n), a, east_phase));
            if let Some(b_east) = spec.shifted_site(a, 1, 0, Sublattice::B) {
                terms.push(nn(a, b_east, east_phase));
            }
            terms.push(nn(a, c, 0.0));
            if let Some(a_north) = spec.shifted_site(a, 0, 1, Sublattice::A) {
                // Crossing the periodic y-seam needs the compensating gauge
                // function χ(m) = 2θ·ny·m so every plaquette keeps flux 2θ.
                let phase = if periodic && n == spec.ny { 2.0 * theta * (spec.ny * m) as f64 } else { 0.0 };
                terms.push(nn(c, a_north, phase));
            }
            if spec.nnn_tprime != 0.0 {
                for (sub, sign) in [(Sublattice::C, 1.0), (Sublattice::B, -1.0)] {
                    let here = SiteIndex::new(m, n, sub);
                    if let Some(diag) = spec.shifted_site(here, 1, 1, sub) {
                        // sign·t′ (α†[m,n] α[m+1,n+1] + h.c.)
                        terms.push(HoppingTerm {
                            from: diag,
                            to: here,
                            strength: sign * spec.nnn_tprime,
                            phase: 0.0,
                            kind: HoppingKind::NextNearest,
                        });
                    }
                }
            }
        }
    }
    terms
}

/// Hermitian hopping matrix over all `3·nx·ny` sites.
#[derive(Debug, Clone)]
pub struct RealSpaceHamiltonian {
    spec: LiebLatticeSpec,
    terms: Vec<HoppingTerm>,
    entries: DMatrix<Complex64>,
    nearest: DMatrix<Complex64>,
    onsite: Vec<f64>,
}

fn add_hop(m: &mut DMatrix<Complex64>, to: usize, from: usize, amp: Complex64) {
    m[(to, from)] += amp;
    m[(from, to)] += amp.conj();
}

pub fn build_lieb(spec: &LiebLatticeSpec) -> Result<RealSpaceHamiltonian> {
    spec.validate()?;
    let dim = spec.dim();
    let terms = lieb_hoppings(spec);
    let mut entries = DMatrix::zeros(dim, dim);
    let mut nearest = DMatrix::zeros(dim, dim);
    for term in &terms {
        let (to, from) = (term.to.flat(spec.nx), term.from.flat(spec.nx));
        let amp = term.amplitude();
        add_hop(&mut entries, to, from, amp);
        if term.kind == HoppingKind::Nearest {
            add_hop(&mut nearest, to, from, amp);
        }
    }
    Ok(RealSpaceHamiltonian { spec: *spec, terms, entries, nearest, onsite: vec![0.0; dim] })
}

impl RealSpaceHamiltonian {
    pub fn spec(&self) -> &LiebLatticeSpec {
        &self.spec
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    /// Full matrix: hoppings of both ranges plus any on-site disorder.
    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    /// Nearest-neighbour part only.
    pub fn nearest_neighbour(&self) -> &DMatrix<Complex64> {
        &self.nearest
    }

    pub fn terms(&self) -> &[HoppingTerm] {
        &self.terms
    }

    pub fn onsite(&self) -> &[f64] {
        &self.onsite
    }

    /// Adds a diagonal (on-site frequency) perturbation in rad/s.
    pub fn with_onsite(mut self, disorder: &[f64]) -> Result<Self> {
        if disorder.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: disorder.len() });
        }
        for (i, &d) in disorder.iter().enumerate() {
            self.entries[(i, i)] += Complex64::new(d, 0.0);
            self.onsite[i] += d;
        }
        Ok(self)
    }

    /// Applies the local U(1) transformation `a_j -> e^{iχ_j} a_j`.
    pub fn gauge_transformed(&self, chi: &[f64]) -> Result<Self> {
        let dim = self.dim();
        if chi.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: chi.len() });
        }
        let u: Vec<Complex64> = chi.iter().map(|&x| Complex64::from_polar(1.0, x)).collect();
        let transform = |src: &DMatrix<Complex64>| {
            let mut out = src.clone();
            for j in 0..dim {
                for i in 0..j {
                    let v = u[i] * src[(i, j)] * u[j].conj();
                    out[(i, j)] = v;
                    out[(j, i)] = v.conj();
                }
            }
            out
        };
        let nx = self.spec.nx;
        let terms = self
            .terms
            .iter()
            .map(|t| HoppingTerm { phase: t.phase + chi[t.to.flat(nx)] - chi[t.from.flat(nx)], ..*t })
            .collect();
        Ok(RealSpaceHamiltonian {
            spec: self.spec,
            terms,
            entries: transform(&self.entries),
            nearest: transform(&self.nearest),
            onsite: self.onsite.clone(),
        })
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::hermitian_eigenvalues(&self.entries)
    }

    pub fn hermitian_defect(&self) -> f64 {
        linalg::max_hermitian_defect(&self.entries)
    }

    /// Nonzero entries in row-major order as `(row, col, value)`.
    pub fn coordinate_list(&self) -> Vec<(usize, usize, Complex64)> {
        let dim = self.dim();
        let mut out = Vec::new();
        for i in 0..dim {
            for j in 0..dim {
                let v = self.entries[(i, j)];
                if v != Complex64::new(0.0, 0.0) {
                    out.push((i, j, v));
                }
            }
        }
        out
    }
}

/// Amplitudes `P_{r,α}` of a single-particle state.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector(pub DVector<Complex64>);

impl StateVector {
    pub fn zeros(dim: usize) -> Self {
        StateVector(DVector::zeros(dim))
    }

    pub fn basis(dim: usize, index: usize) -> Self {
        let mut v = DVector::zeros(dim);
        v[index] = Complex64::new(1.0, 0.0);
        StateVector(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.0
    }

    /// Flat indices with nonzero amplitude.
    pub fn support(&self) -> Vec<usize> {
        self.0.iter().enumerate().filter(|(_, z)| z.norm() > 0.0).map(|(i, _)| i).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RingModeKind {
    /// Single plaquette, zero flux.
    Rm1,
    /// Two adjacent plaquettes, zero flux.
    Rm2,
    /// Ring around a row of three plaquettes at θ = π/3 (enclosed flux 2π).
    Rm3,
}

/// Bond endpoints of the counterclockwise loop around the plaquette whose
/// lower-left corner is `anchor`.
fn plaquette_loop(spec: &LiebLatticeSpec, anchor: SiteIndex) -> Option<[SiteIndex; 8]> {
    let (m, n) = (anchor.m, anchor.n);
    let (me, _) = spec.shift(m, n, 1, 0)?;
    let (_, nn) = spec.shift(m, n, 0, 1)?;
    Some([
        SiteIndex::a(m, n),
        SiteIndex::b(me, n),
        SiteIndex::a(me, n),
        SiteIndex::c(me, n),
        SiteIndex::a(me, nn),
        SiteIndex::b(me, nn),
        SiteIndex::a(m, nn),
        SiteIndex::c(m, n),
    ])
}

/// Gauge-invariant flux through the plaquette anchored at its lower-left `A`
/// site, as the argument of the counterclockwise hopping-phase product, in
/// `(−π, π]`.
pub fn plaquette_flux(h: &RealSpaceHamiltonian, anchor: SiteIndex) -> Result<f64> {
    let spec = h.spec();
    if anchor.sublattice != Sublattice::A {
        return Err(Error::invalid("plaquette_anchor", format!("{anchor} is not an A site")));
    }
    spec.flat(anchor)?;
    if spec.boundary == Boundary::Periodic && (spec.nx < 2 || spec.ny < 2) {
        return Err(Error::invalid("plaquette_anchor", "periodic lattices need at least 2x2 cells for plaquettes"));
    }
    let ring = plaquette_loop(spec, anchor).ok_or_else(|| Error::FootprintOutside {
        what: "plaquette".into(),
        anchor,
        nx: spec.nx,
        ny: spec.ny,
    })?;
    let nearest = h.nearest_neighbour();
    let mut product = Complex64::new(1.0, 0.0);
    for k in 0..8 {
        let (from, to) = (ring[k], ring[(k + 1) % 8]);
        let amp = nearest[(to.flat(spec.nx), from.flat(spec.nx))];
        if amp.norm() == 0.0 {
            return Err(Error::MissingBond { anchor, from, to });
        }
        product *= amp / amp.norm();
    }
    let mut phi = product.arg();
    if phi <= -PI {
        phi += TAU;
    }
    Ok(phi)
}

/// Ring-mode footprint: sites with their (unnormalized) amplitudes.
fn ring_footprint(kind: RingModeKind, spec: &LiebLatticeSpec, anchor: SiteIndex) -> Option<Vec<(SiteIndex, f64)>> {
    let s = |dm: isize, dn: isize, sub: Sublattice| spec.shifted_site(anchor, dm, dn, sub);
    use Sublattice::{B, C};
    let sites = match kind {
        RingModeKind::Rm1 => vec![
            (s(0, 0, C)?, 1.0),
            (s(1, 0, B)?, -1.0),
            (s(1, 0, C)?, 1.0),
            (s(1, 1, B)?, -1.0),
        ],
        RingModeKind::Rm2 => vec![
            (s(0, 0, C)?, 1.0),
            (s(2, 0, C)?, -1.0),
            (s(1, 0, B)?, -1.0),
            (s(1, 1, B)?, -1.0),
            (s(2, 0, B)?, 1.0),
            (s(2, 1, B)?, 1.0),
        ],
        // Amplitudes come from the local null space; only the sites matter.
        RingModeKind::Rm3 => vec![
            (s(0, 0, C)?, 0.0),
            (s(1, 0, B)?, 0.0),
            (s(2, 0, B)?, 0.0),
            (s(3, 0, B)?, 0.0),
            (s(3, 0, C)?, 0.0),
            (s(3, 1, B)?, 0.0),
            (s(2, 1, B)?, 0.0),
            (s(1, 1, B)?, 0.0),
        ],
    };
    // Corner A sites must exist too (checked for open edges via the shifts above
    // except for the top-right corner of the footprint).
    let (w, h) = match kind {
        RingModeKind::Rm1 => (1, 1),
        RingModeKind::Rm2 => (2, 1),
        RingModeKind::Rm3 => (3, 1),
    };
    s(w, h, Sublattice::A)?;
    Some(sites)
}

/// Compact localized zero-energy state of the nearest-neighbour lattice.
pub fn ring_mode(kind: RingModeKind, anchor: SiteIndex, spec: &LiebLatticeSpec) -> Result<StateVector> {
    spec.validate()?;
    if anchor.sublattice != Sublattice::A {
        return Err(Error::invalid("anchor", format!("{anchor} is not an A site")));
    }
    spec.flat(anchor)?;
    if kind == RingModeKind::Rm3 && (spec.gauge_theta - PI / 3.0).abs() > PHASE_TOLERANCE {
        return Err(Error::GaugeMismatch { theta: spec.gauge_theta });
    }
    let footprint = ring_footprint(kind, spec, anchor).ok_or_else(|| Error::FootprintOutside {
        what: format!("{kind:?} ring mode"),
        anchor,
        nx: spec.nx,
        ny: spec.ny,
    })?;
    let mut v = DVector::zeros(spec.dim());
    match kind {
        RingModeKind::Rm1 | RingModeKind::Rm2 => {
            let norm = (footprint.len() as f64).sqrt();
            for (site, amp) in footprint {
                v[site.flat(spec.nx)] += Complex64::new(amp / norm, 0.0);
            }
        }
        RingModeKind::Rm3 => {
            for (site, amp) in local_zero_mode(spec, &footprint)? {
                v[site.flat(spec.nx)] = amp;
            }
        }
    }
    Ok(StateVector(v))
}

/// Unit vector on the footprint sites annihilated by every A row of the
/// nearest-neighbour Hamiltonian that touches the footprint.
fn local_zero_mode(spec: &LiebLatticeSpec, footprint: &[(SiteIndex, f64)]) -> Result<Vec<(SiteIndex, Complex64)>> {
    let nn_spec = LiebLatticeSpec { nnn_tprime: 0.0, ..*spec };
    let mut amplitude: HashMap<(SiteIndex, SiteIndex), Complex64> = HashMap::new();
    for term in lieb_hoppings(&nn_spec) {
        *amplitude.entry((term.to, term.from)).or_default() += term.amplitude();
        let c = term.conjugate();
        *amplitude.entry((c.to, c.from)).or_default() += c.amplitude();
    }
    let mut corners: Vec<SiteIndex> = Vec::new();
    for (site, _) in footprint {
        for (to, from) in amplitude.keys() {
            if from == site && to.sublattice == Sublattice::A && !corners.contains(to) {
                corners.push(*to);
            }
        }
    }
    corners.sort();
    let block = DMatrix::from_fn(corners.len(), footprint.len(), |i, j| {
        amplitude.get(&(corners[i], footprint[j].0)).copied().unwrap_or_default()
    });
    // Pad to square so the SVD exposes the full right null space.
    let cols = footprint.len();
    let square = if block.nrows() < cols { block.clone().resize(cols, cols, Complex64::default()) } else { block };
    let svd = square.svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let (k, sigma) = svd
        .singular_values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(k, s)| (k, *s))
        .expect("nonempty footprint");
    if sigma > 1e-10 * spec.hopping.max(f64::MIN_POSITIVE) {
        return Err(Error::NoLocalZeroMode { sigma });
    }
    let mut null: Vec<Complex64> = v_t.row(k).iter().map(|z| z.conj()).collect();
    // Fix the global phase: first footprint amplitude real and positive.
    let pivot = null[0];
    let rot = pivot.conj() / pivot.norm();
    let norm = null.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for z in &mut null {
        *z = *z * rot / norm;
    }
    Ok(footprint.iter().map(|(s, _)| *s).zip(null).collect())
}

/// `‖H_NN·ψ‖`: zero exactly when the neighbour sums of the amplitudes cancel
/// at every site.
pub fn interference_residual(state: &StateVector, h: &RealSpaceHamiltonian) -> Result<f64> {
    if state.dim() != h.dim() {
        return Err(Error::DimensionMismatch { expected: h.dim(), found: state.dim() });
    }
    Ok((h.nearest_neighbour() * state.amplitudes()).norm())
}

#[cfg(test)]
mod tests {
    use super::*;

    const T: f64 = 1.0;

    #[test]
    fn flat_index_is_a_bijection() {
        let (nx, ny) = (4, 3);
        let mut seen = vec![false; 3 * nx * ny];
        for n in 1..=ny {
            for m in 1..=nx {
                for sub in Sublattice::ALL {
                    let s = SiteIndex::new(m, n, sub);
                    let i = s.flat(nx);
                    assert!(!seen[i]);
                    seen[i] = true;
                    assert_eq!(SiteIndex::from_flat(i, nx), s);
                }
            }
        }
        assert!(seen.into_iter().all(|x| x));
    }

    #[test]
    fn single_cell_star_spectrum() {
        let h = build_lieb(&LiebLatticeSpec::new(1, 1, T)).unwrap();
        let e = h.eigenvalues();
        let r2 = 2f64.sqrt();
        assert!((e[0] + r2).abs() < 1e-14 && e[1].abs() < 1e-14 && (e[2] - r2).abs() < 1e-14);
        let a = SiteIndex::a(1, 1).flat(1);
        let b = SiteIndex::b(1, 1).flat(1);
        let c = SiteIndex::c(1, 1).flat(1);
        assert_eq!(h.matrix()[(a, b)].re, T);
        assert_eq!(h.matrix()[(a, c)].re, T);
        assert_eq!(h.matrix()[(b, c)].norm(), 0.0);
    }

    #[test]
    fn dimension_and_exact_hermiticity() {
        let spec = LiebLatticeSpec::new(12, 12, T).with_gauge(0.7).with_nnn(0.06);
        let h = build_lieb(&spec).unwrap();
        assert_eq!(h.dim(), 432);
        assert_eq!(h.hermitian_defect(), 0.0);
        for i in 0..h.dim() {
            assert_eq!(h.matrix()[(i, i)].norm(), 0.0);
        }
    }

    #[test]
    fn rejects_empty_lattice() {
        assert!(matches!(build_lieb(&LiebLatticeSpec::new(0, 3, T)), Err(Error::EmptyLattice { .. })));
        assert!(matches!(build_lieb(&LiebLatticeSpec::new(3, 0, T)), Err(Error::EmptyLattice { .. })));
    }

    #[test]
    fn rejects_unquantized_torus_flux() {
        let spec = LiebLatticeSpec::new(4, 4, T).with_gauge(0.3).with_boundary(Boundary::Periodic);
        assert!(matches!(build_lieb(&spec), Err(Error::FluxQuantization { .. })));
        // 2θ·nx·ny = 2π·k with θ = π/16 on 4x4.
        let ok = spec.with_gauge(PI / 16.0);
        assert!(build_lieb(&ok).is_ok());
    }

    #[test]
    fn rejects_out_of_range_parameters() {
        assert!(build_lieb(&LiebLatticeSpec::new(2, 2, -1.0)).is_err());
        assert!(build_lieb(&LiebLatticeSpec::new(2, 2, T).with_gauge(TAU)).is_err());
        assert!(build_lieb(&LiebLatticeSpec::new(2, 2, T).with_nnn(-0.1)).is_err());
    }

    #[test]
    fn plaquette_flux_is_twice_theta() {
        let h0 = build_lieb(&LiebLatticeSpec::new(4, 4, T)).unwrap();
        assert_eq!(plaquette_flux(&h0, SiteIndex::a(2, 2)).unwrap(), 0.0);
        let h = build_lieb(&LiebLatticeSpec::new(5, 5, T).with_gauge(PI / 3.0)).unwrap();
        for n in 1..5 {
            for m in 1..5 {
                let phi = plaquette_flux(&h, SiteIndex::a(m, n)).unwrap();
                assert!((phi - 2.0 * PI / 3.0).abs() < 1e-12, "{phi}");
            }
        }
    }

    #[test]
    fn periodic_seam_plaquettes_carry_the_same_flux() {
        // 2θ·nx·ny = 2π·3 with θ = π/12 on 3x4... choose θ = π/4 on 4x4 (flux 8π).
        let spec = LiebLatticeSpec::new(4, 4, T).with_gauge(PI / 4.0).with_boundary(Boundary::Periodic);
        let h = build_lieb(&spec).unwrap();
        for n in 1..=4 {
            for m in 1..=4 {
                let phi = plaquette_flux(&h, SiteIndex::a(m, n)).unwrap();
                assert!((phi - PI / 2.0).abs() < 1e-12, "({m},{n}) {phi}");
            }
        }
    }

    #[test]
    fn plaquette_on_open_edge_is_rejected() {
        let h = build_lieb(&LiebLatticeSpec::new(3, 3, T)).unwrap();
        assert!(matches!(plaquette_flux(&h, SiteIndex::a(3, 1)), Err(Error::FootprintOutside { .. })));
        assert!(plaquette_flux(&h, SiteIndex::b(1, 1)).is_err());
        let dead = build_lieb(&LiebLatticeSpec::new(3, 3, 0.0)).unwrap();
        assert!(matches!(plaquette_flux(&dead, SiteIndex::a(1, 1)), Err(Error::MissingBond { .. })));
    }

    #[test]
    fn rm1_amplitudes() {
        let spec = LiebLatticeSpec::new(4, 4, T);
        let v = ring_mode(RingModeKind::Rm1, SiteIndex::a(2, 2), &spec).unwrap();
        let at = |s: SiteIndex| v.0[s.flat(4)];
        assert_eq!(at(SiteIndex::c(2, 2)).re, 0.5);
        assert_eq!(at(SiteIndex::b(3, 2)).re, -0.5);
        assert_eq!(at(SiteIndex::c(3, 2)).re, 0.5);
        assert_eq!(at(SiteIndex::b(3, 3)).re, -0.5);
        assert_eq!(v.support().len(), 4);
        assert!((v.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn ring_modes_are_in_the_kernel() {
        let spec = LiebLatticeSpec::new(6, 6, T);
        let h = build_lieb(&spec).unwrap();
        for kind in [RingModeKind::Rm1, RingModeKind::Rm2] {
            let v = ring_mode(kind, SiteIndex::a(2, 3), &spec).unwrap();
            assert!((v.norm() - 1.0).abs() < 1e-14);
            assert!(interference_residual(&v, &h).unwrap() <= 1e-12 * T);
        }
        let mspec = spec.with_gauge(PI / 3.0);
        let hm = build_lieb(&mspec).unwrap();
        let v = ring_mode(RingModeKind::Rm3, SiteIndex::a(2, 3), &mspec).unwrap();
        assert!((v.norm() - 1.0).abs() < 1e-12);
        assert_eq!(v.support().len(), 8);
        assert!(v.support().iter().all(|&i| SiteIndex::from_flat(i, 6).sublattice != Sublattice::A));
        assert!(interference_residual(&v, &hm).unwrap() <= 1e-12 * T);
        // Uniform magnitude around the ring.
        for i in v.support() {
            assert!((v.0[i].norm() - 8f64.sqrt().recip()).abs() < 1e-12);
        }
    }

    #[test]
    fn nnn_terms_do_not_enter_the_residual() {
        let spec = LiebLatticeSpec::new(5, 5, T).with_nnn(0.1);
        let h = build_lieb(&spec).unwrap();
        let v = ring_mode(RingModeKind::Rm1, SiteIndex::a(2, 2), &spec).unwrap();
        assert!(interference_residual(&v, &h).unwrap() <= 1e-12);
        assert!((h.matrix() * v.amplitudes()).norm() > 1e-3);
    }

    #[test]
    fn ring_mode_errors() {
        let spec = LiebLatticeSpec::new(4, 4, T);
        assert!(matches!(
            ring_mode(RingModeKind::Rm1, SiteIndex::a(4, 2), &spec),
            Err(Error::FootprintOutside { .. })
        ));
        assert!(matches!(
            ring_mode(RingModeKind::Rm2, SiteIndex::a(3, 1), &spec),
            Err(Error::FootprintOutside { .. })
        ));
        assert!(matches!(ring_mode(RingModeKind::Rm3, SiteIndex::a(1, 1), &spec), Err(Error::GaugeMismatch { .. })));
        let m = spec.with_gauge(PI / 3.0);
        assert!(matches!(
            ring_mode(RingModeKind::Rm3, SiteIndex::a(2, 1), &m),
            Err(Error::FootprintOutside { .. })
        ));
    }

    #[test]
    fn single_b_site_is_not_dark() {
        let spec = LiebLatticeSpec::new(3, 3, T);
        let h = build_lieb(&spec).unwrap();
        let interior = StateVector::basis(spec.dim(), SiteIndex::b(2, 2).flat(3));
        // B[2,2] has two A neighbours.
        assert!((interference_residual(&interior, &h).unwrap() - 2f64.sqrt() * T).abs() < 1e-14);
        let edge = StateVector::basis(spec.dim(), SiteIndex::b(1, 2).flat(3));
        assert!((interference_residual(&edge, &h).unwrap() - T).abs() < 1e-14);
    }

    #[test]
    fn disorder_lands_on_the_diagonal_only() {
        let spec = LiebLatticeSpec::new(2, 2, T);
        let d: Vec<f64> = (0..spec.dim()).map(|i| 0.01 * i as f64).collect();
        let h = build_lieb(&spec).unwrap().with_onsite(&d).unwrap();
        assert_eq!(h.matrix()[(5, 5)].re, 0.05);
        assert_eq!(h.nearest_neighbour()[(5, 5)].norm(), 0.0);
        assert!(build_lieb(&spec).unwrap().with_onsite(&[0.0]).is_err());
    }

    #[test]
    fn coordinate_list_matches_matrix() {
        let h = build_lieb(&LiebLatticeSpec::new(2, 2, T).with_gauge(0.5)).unwrap();
        let coo = h.coordinate_list();
        // 4 cells, bonds: west+north-half+south-half per cell plus interior
        // east and north links; each stored twice.
        let nn_bonds = h.terms().len();
        assert_eq!(coo.len(), 2 * nn_bonds);
        for (i, j, v) in coo {
            assert_eq!(h.matrix()[(i, j)], v);
        }
    }
}
