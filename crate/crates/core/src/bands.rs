//! Momentum-space bands of the translation-invariant lattice.
//!
//! Bloch convention: the A–B entry is `T(1 + e^{i kx})` and the A–C entry is
//! `T(1 + e^{−i ky})` with `k ∈ [0, 2π]²`, so the dispersive sheets are
//! `±2T·sqrt(cos²(kx/2) + cos²(ky/2))` and the three bands touch at `(π, π)`.

use std::f64::consts::TAU;

use nalgebra::Matrix3;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochMatrix {
    pub k: (f64, f64),
    pub matrix: Matrix3<Complex64>,
}

impl BlochMatrix {
    /// Ascending eigenvalues, rad/s.
    pub fn eigenvalues(&self) -> [f64; 3] {
        let ev = self.matrix.symmetric_eigenvalues();
        let mut out = [ev[0], ev[1], ev[2]];
        out.sort_by(f64::total_cmp);
        out
    }

    pub fn hermitian_defect(&self) -> f64 {
        linalg::max_hermitian_defect(&self.matrix)
    }
}

/// `H_k` with the diagonal next-nearest-neighbour correction
/// `2t′·diag(0, −cos(kx−ky), +cos(kx−ky))`.
pub fn bloch_hamiltonian(k: (f64, f64), hopping: f64, tprime: f64) -> BlochMatrix {
    let (kx, ky) = k;
    let one = Complex64::new(1.0, 0.0);
    let ab = (one + Complex64::from_polar(1.0, kx)) * hopping;
    let ac = (one + Complex64::from_polar(1.0, -ky)) * hopping;
    let d = Complex64::new(2.0 * tprime * (kx - ky).cos(), 0.0);
    let zero = Complex64::default();
    #[rustfmt::skip]
    let matrix = Matrix3::new(
        zero,      ab,   ac,
        ab.conj(), -d,   zero,
        ac.conj(), zero, d,
    );
    BlochMatrix { k, matrix }
}

/// Closed-form nearest-neighbour bands `(Ω₋, Ω₀, Ω₊)`.
pub fn analytic_bands(k: (f64, f64), hopping: f64) -> (f64, f64, f64) {
    let (kx, ky) = k;
    let r = 2.0 * hopping * ((kx / 2.0).cos().powi(2) + (ky / 2.0).cos().powi(2)).sqrt();
    (-r, 0.0, r)
}

/// Eigenvalues on a uniform `nk × nk` grid spanning `[0, 2π]` in each
/// direction, endpoints included.
#[derive(Debug, Clone)]
pub struct BandSurface {
    pub nk: usize,
    /// Grid coordinates shared by kx and ky.
    pub ks: Vec<f64>,
    /// Row-major: index `i·nk + j` holds `(ks[i], ks[j])`.
    pub energies: Vec<[f64; 3]>,
}

impl BandSurface {
    pub fn at(&self, i: usize, j: usize) -> [f64; 3] {
        self.energies[i * self.nk + j]
    }

    pub fn k(&self, i: usize, j: usize) -> (f64, f64) {
        (self.ks[i], self.ks[j])
    }

    pub fn sheet(&self, band: usize) -> impl Iterator<Item = f64> + '_ {
        self.energies.iter().map(move |e| e[band])
    }
}

pub fn band_grid(nk: usize, hopping: f64, tprime: f64) -> Result<BandSurface> {
    if nk < 2 {
        return Err(Error::invalid("nk", format!("grid needs at least 2 points per axis, got {nk}")));
    }
    let ks: Vec<f64> = (0..nk).map(|i| TAU * i as f64 / (nk - 1) as f64).collect();
    let energies = (0..nk * nk)
        .into_par_iter()
        .map(|idx| bloch_hamiltonian((ks[idx / nk], ks[idx % nk]), hopping, tprime).eigenvalues())
        .collect();
    Ok(BandSurface { nk, ks, energies })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Flatness {
    /// max − min of the sheet, rad/s.
    pub width: f64,
    /// `width` over the total spectral span; 0 when the span vanishes.
    pub ratio: f64,
}

pub fn flatness(surface: &BandSurface, band: usize) -> Result<Flatness> {
    if band > 2 {
        return Err(Error::invalid("band", format!("must be 0, 1 or 2, got {band}")));
    }
    let (lo, hi) = min_max(surface.sheet(band));
    let (bottom, _) = min_max(surface.sheet(0));
    let (_, top) = min_max(surface.sheet(2));
    let width = hi - lo;
    let span = top - bottom;
    let ratio = if span > 0.0 { width / span } else { 0.0 };
    Ok(Flatness { width, ratio })
}

fn min_max(values: impl Iterator<Item = f64>) -> (f64, f64) {
    values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
}
