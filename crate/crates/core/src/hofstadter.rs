//! Open-boundary spectrum as a function of the gauge phase.

use std::f64::consts::TAU;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lattice::{build_lieb, Boundary, LiebLatticeSpec};

/// Largest matrix dimension [`butterfly`] will diagonalize.
pub const DEFAULT_DIM_CAP: usize = 5000;

#[derive(Debug, Clone)]
pub struct ButterflySpectrum {
    /// Gauge phases as requested, rad.
    pub thetas: Vec<f64>,
    /// One ascending row of `3·nx·ny` eigenvalues per entry of `thetas`.
    pub energies: Vec<Vec<f64>>,
    /// Template with `gauge_theta = 0`.
    pub spec: LiebLatticeSpec,
}

pub fn butterfly(nx: usize, ny: usize, hopping: f64, tprime: f64, thetas: &[f64]) -> Result<ButterflySpectrum> {
    butterfly_with_cap(nx, ny, hopping, tprime, thetas, DEFAULT_DIM_CAP)
}

pub fn butterfly_with_cap(
    nx: usize,
    ny: usize,
    hopping: f64,
    tprime: f64,
    thetas: &[f64],
    cap: usize,
) -> Result<ButterflySpectrum> {
    if thetas.is_empty() {
        return Err(Error::invalid("theta_grid", "must contain at least one value"));
    }
    if let Some(bad) = thetas.iter().find(|t| !t.is_finite()) {
        return Err(Error::invalid("theta_grid", format!("non-finite gauge phase {bad}")));
    }
    let spec = LiebLatticeSpec::new(nx, ny, hopping).with_nnn(tprime).with_boundary(Boundary::Open);
    spec.validate()?;
    if spec.dim() > cap {
        return Err(Error::DimensionCap { dim: spec.dim(), cap });
    }
    let energies = thetas
        .par_iter()
        .map(|&theta| Ok(build_lieb(&spec.with_gauge(theta.rem_euclid(TAU)))?.eigenvalues()))
        .collect::<Result<Vec<_>>>()?;
    Ok(ButterflySpectrum { thetas: thetas.to_vec(), energies, spec })
}

/// Spread (max − min) of the eigenvalues inside `[−window, window]`, per θ.
pub fn middle_cluster_width(spectrum: &ButterflySpectrum, window: f64) -> Result<Vec<f64>> {
    if !(window.is_finite() && window > 0.0) {
        return Err(Error::invalid("window", format!("must be finite and > 0, got {window}")));
    }
    spectrum
        .energies
        .iter()
        .enumerate()
        .map(|(theta_index, row)| {
            let inside = row.iter().copied().filter(|e| e.abs() <= window);
            let (lo, hi) = inside.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), e| (lo.min(e), hi.max(e)));
            if lo > hi {
                Err(Error::EmptyWindow { window, theta_index })
            } else {
                Ok(hi - lo)
            }
        })
        .collect()
}

/// `count` evenly spaced values over `[start, end]`, endpoints included.
pub fn linspace(start: f64, end: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![start],
        _ => (0..count).map(|i| start + (end - start) * i as f64 / (count - 1) as f64).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn zero_theta_column_matches_lattice() {
        let s = butterfly(3, 2, 1.0, 0.1, &[0.0, 0.4]).unwrap();
        let direct = build_lieb(&LiebLatticeSpec::new(3, 2, 1.0).with_nnn(0.1)).unwrap().eigenvalues();
        assert_eq!(s.energies[0], direct);
        assert!(s.energies.iter().all(|row| row.len() == 18 && row.windows(2).all(|w| w[0] <= w[1])));
    }

    #[test]
    fn negative_theta_is_wrapped() {
        let s = butterfly(2, 2, 1.0, 0.0, &[-PI / 3.0, 5.0 * PI / 3.0]).unwrap();
        assert_eq!(s.energies[0], s.energies[1]);
    }

    #[test]
    fn flat_cluster_has_zero_width() {
        let s = butterfly(4, 4, 1.0, 0.0, &linspace(0.0, PI, 5)).unwrap();
        for w in middle_cluster_width(&s, 0.1).unwrap() {
            assert!(w <= 1e-9);
        }
    }

    #[test]
    fn oversized_window_returns_full_span() {
        let s = butterfly(2, 2, 1.0, 0.0, &[0.3]).unwrap();
        let row = &s.energies[0];
        let w = middle_cluster_width(&s, 100.0).unwrap()[0];
        assert!((w - (row[row.len() - 1] - row[0])).abs() < 1e-12);
    }

    #[test]
    fn errors() {
        assert!(matches!(butterfly(2, 2, 1.0, 0.0, &[]), Err(Error::InvalidParameter { .. })));
        assert!(matches!(
            butterfly_with_cap(10, 10, 1.0, 0.0, &[0.0], 100),
            Err(Error::DimensionCap { dim: 300, cap: 100 })
        ));
        // Gapped row: nothing inside the window.
        let s = ButterflySpectrum {
            thetas: vec![0.0],
            energies: vec![vec![-2.0, 2.0]],
            spec: LiebLatticeSpec::new(1, 1, 1.0),
        };
        assert!(matches!(middle_cluster_width(&s, 0.5), Err(Error::EmptyWindow { theta_index: 0, .. })));
        assert!(middle_cluster_width(&s, 0.0).is_err());
    }

    #[test]
    fn linspace_endpoints() {
        let g = linspace(0.0, PI, 21);
        assert_eq!(g.len(), 21);
        assert_eq!(g[0], 0.0);
        assert_eq!(g[20], PI);
        assert_eq!(linspace(1.0, 2.0, 1), vec![1.0]);
    }
}
