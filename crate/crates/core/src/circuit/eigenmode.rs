//! Normal modes of the three resonators sharing one grounding SQUID.
//!
//! With `f_α(x) = C_α·sin(kx)` the current balance at the SQUID node reads
//! `Σ_β C_β·L_J·k·cos(kL_β) + (l − C_J·L_J·k²/c)·C_α·sin(kL_α) = 0` for every
//! α, a 3×3 homogeneous system `M(k)·C = 0` whose determinant vanishes at
//! the mode wavenumbers.

use nalgebra::{Matrix3, Vector3};

use super::{simpson, CircuitParams, Tlr};
use crate::error::{Error, Result};
use crate::units::HBAR;

/// Determinant scan resolution over the bracketing interval.
const SCAN_POINTS: usize = 20_000;
const QUADRATURE_PANELS: usize = 10_000;
/// Bare-mode window half-width, relative.
const WINDOW: f64 = 0.2;

#[derive(Debug, Clone, PartialEq)]
pub struct EigenmodeSolution {
    /// Wavenumbers `k_m`, 1/m, indexed by the resonator each mode lives in.
    pub k: [f64; 3],
    /// `ω_m = v·k_m`, rad/s.
    pub omega: [f64; 3],
    /// `coeffs[m][α] = C_{α,m}`, normalized, m^{-1/2}.
    pub coeffs: [[f64; 3]; 3],
    /// `f_{α,m}(L_α)`, identical for all α and chosen positive.
    pub f_junction: [f64; 3],
    /// r.m.s. node flux at the SQUID, `φ^m = f_J·√(ħ/2ω_m c)`, Wb.
    pub phi_rms: [f64; 3],
    /// The roots in ascending order, before assignment to resonators.
    pub ascending_k: [f64; 3],
}

fn system_matrix(p: &CircuitParams, k: f64) -> Matrix3<f64> {
    let lj = p.l_j();
    let diag = p.l - p.c_j * lj * k * k / p.c;
    Matrix3::from_fn(|a, b| {
        let mut v = lj * k * (k * p.lengths[b]).cos();
        if a == b {
            v += diag * (k * p.lengths[a]).sin();
        }
        v
    })
}

fn determinant(p: &CircuitParams, k: f64) -> f64 {
    system_matrix(p, k).determinant()
}

fn bisect(p: &CircuitParams, mut lo: f64, mut hi: f64) -> f64 {
    let mut f_lo = determinant(p, lo);
    while (hi - lo) > 1e-12 * hi {
        let mid = 0.5 * (lo + hi);
        let f_mid = determinant(p, mid);
        if f_mid == 0.0 {
            return mid;
        }
        if (f_mid > 0.0) == (f_lo > 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `∫_0^L sin(ax)·sin(bx) dx`.
fn sin_overlap(a: f64, b: f64, len: f64) -> f64 {
    let plus = (a + b) * len;
    let minus = a - b;
    let cross = if minus.abs() * len < 1e-8 {
        // sin(εL)/(2ε) → L/2.
        len / 2.0
    } else {
        (minus * len).sin() / (2.0 * minus)
    };
    cross - plus.sin() / (2.0 * (a + b))
}

/// Null vector of `M(k)` with `f_J = C_α sin(kL_α) > 0`, unnormalized.
fn null_vector(p: &CircuitParams, k: f64) -> Vector3<f64> {
    let svd = system_matrix(p, k).svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let (idx, _) = svd
        .singular_values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("three singular values");
    let mut v: Vector3<f64> = v_t.row(idx).transpose();
    let f_j: f64 = (0..3).map(|a| v[a] * (k * p.lengths[a]).sin()).sum::<f64>() / 3.0;
    if f_j < 0.0 {
        v = -v;
    }
    v
}

pub fn solve_eigenmodes(p: &CircuitParams) -> Result<EigenmodeSolution> {
    p.validate()?;
    let bare: Vec<f64> = p.lengths.iter().map(|len| std::f64::consts::PI / len).collect();
    let k_lo = (1.0 - WINDOW) * bare.iter().copied().fold(f64::INFINITY, f64::min);
    let k_hi = (1.0 + WINDOW) * bare.iter().copied().fold(0.0, f64::max);

    let mut roots = Vec::new();
    let step = (k_hi - k_lo) / SCAN_POINTS as f64;
    let mut prev_k = k_lo;
    let mut prev = determinant(p, prev_k);
    for i in 1..=SCAN_POINTS {
        let k = k_lo + step * i as f64;
        let cur = determinant(p, k);
        if prev == 0.0 {
            roots.push(prev_k);
        } else if (prev > 0.0) != (cur > 0.0) && cur != 0.0 {
            roots.push(bisect(p, prev_k, k));
        }
        if roots.len() == 3 {
            break;
        }
        prev_k = k;
        prev = cur;
    }
    if roots.len() < 3 {
        let missing = Tlr::ALL[roots.len()];
        return Err(Error::RootBracketing {
            tlr: missing.label(),
            reason: format!("found only {} sign changes of det M(k) on [{k_lo:.4e}, {k_hi:.4e}] 1/m", roots.len()),
        });
    }
    for w in roots.windows(2) {
        if (w[1] - w[0]) <= 1e-6 * w[1] {
            return Err(Error::DegenerateModes(format!("roots {:.9e} and {:.9e} 1/m coincide", w[0], w[1])));
        }
    }

    let v = p.velocity();
    let mut k = [0.0; 3];
    let mut coeffs = [[0.0; 3]; 3];
    let mut f_junction = [0.0; 3];
    let mut filled = [false; 3];
    for &root in &roots {
        let raw = null_vector(p, root);
        let mut norm2 = p.c_j / p.c * junction_value(p, root, &raw).powi(2);
        for a in 0..3 {
            norm2 += raw[a] * raw[a] * sin_overlap(root, root, p.lengths[a]);
        }
        let c = raw / norm2.sqrt();
        let row = [c[0], c[1], c[2]];
        let f_j = junction_value(p, root, &c);
        let shares = energy_shares(p, root, &row, f_j);
        let owner = (0..3).max_by(|&a, &b| shares[a].total_cmp(&shares[b])).expect("three resonators");
        if filled[owner] {
            return Err(Error::DegenerateModes(format!(
                "two modes store most of their energy in resonator {}",
                Tlr::ALL[owner]
            )));
        }
        filled[owner] = true;
        k[owner] = root;
        coeffs[owner] = row;
        f_junction[owner] = f_j;
    }
    for tlr in Tlr::ALL {
        let b = bare[tlr.index()];
        let km = k[tlr.index()];
        if (km - b).abs() > WINDOW * b {
            return Err(Error::RootBracketing {
                tlr: tlr.label(),
                reason: format!("mode at k = {km:.6e} 1/m lies outside ±20% of the bare λ/2 value {b:.6e} 1/m"),
            });
        }
    }
    let omega = k.map(|km| v * km);
    let mut phi_rms = [0.0; 3];
    for m in 0..3 {
        phi_rms[m] = f_junction[m] * (HBAR / (2.0 * omega[m] * p.c)).sqrt();
    }
    Ok(EigenmodeSolution { k, omega, coeffs, f_junction, phi_rms, ascending_k: [roots[0], roots[1], roots[2]] })
}

/// Junction value `f_J`, averaged over the three (equal) branch ends.
fn junction_value(p: &CircuitParams, k: f64, c: &Vector3<f64>) -> f64 {
    (0..3).map(|a| c[a] * (k * p.lengths[a]).sin()).sum::<f64>() / 3.0
}

/// Resonator energies `E^α` and the junction energy, by quadrature.
fn energy_parts(p: &CircuitParams, k: f64, coeffs: &[f64; 3], f_j: f64) -> ([f64; 3], f64) {
    let omega = p.velocity() * k;
    // ½(cω² + k²/l) = k²/l since ω = k/√(lc).
    let weight = 0.5 * (p.c * omega * omega + k * k / p.l);
    let mut tlr = [0.0; 3];
    for a in 0..3 {
        let ca = coeffs[a];
        tlr[a] = weight * simpson(|x| (ca * (k * x).sin()).powi(2), 0.0, p.lengths[a], QUADRATURE_PANELS);
    }
    let junction = 0.5 * (p.c_j * omega * omega + 1.0 / p.l_j()) * f_j * f_j;
    (tlr, junction)
}

fn energy_shares(p: &CircuitParams, k: f64, coeffs: &[f64; 3], f_j: f64) -> [f64; 3] {
    let (tlr, junction) = energy_parts(p, k, coeffs, f_j);
    let total: f64 = tlr.iter().sum::<f64>() + junction;
    tlr.map(|e| e / total)
}

/// Energy-storing ratio `E_m^α / E_m` of mode `mode` in resonator `tlr`.
pub fn esr(sol: &EigenmodeSolution, p: &CircuitParams, mode: Tlr, tlr: Tlr) -> f64 {
    let m = mode.index();
    energy_shares(p, sol.k[m], &sol.coeffs[m], sol.f_junction[m])[tlr.index()]
}

impl EigenmodeSolution {
    /// `f_{α,m}(x) = C_{α,m}·sin(k_m x)`, m^{-1/2}.
    pub fn mode_function(&self, mode: Tlr, tlr: Tlr, x: f64) -> f64 {
        self.coeffs[mode.index()][tlr.index()] * (self.k[mode.index()] * x).sin()
    }

    /// Largest deviation of `Σ_β ∫f_βm f_βn + (C_J/c)·f_J,m·f_J,n` from `δ_mn`.
    pub fn orthonormality_residual(&self, p: &CircuitParams) -> f64 {
        let mut worst = 0.0_f64;
        for m in 0..3 {
            for n in 0..3 {
                let mut s = p.c_j / p.c * self.f_junction[m] * self.f_junction[n];
                for a in 0..3 {
                    s += self.coeffs[m][a] * self.coeffs[n][a] * sin_overlap(self.k[m], self.k[n], p.lengths[a]);
                }
                let target = if m == n { 1.0 } else { 0.0 };
                worst = worst.max((s - target).abs());
            }
        }
        worst
    }

    /// Relative violation of the boundary conditions at the SQUID node:
    /// equal branch-end fluxes and `−(1/l)Σ f′_α(L_α) = (1/L_J − C_J ω²)·f_J`.
    pub fn kirchhoff_residual(&self, p: &CircuitParams) -> f64 {
        let mut worst = 0.0_f64;
        for m in 0..3 {
            let k = self.k[m];
            let c = &self.coeffs[m];
            let f_j = self.f_junction[m];
            let mut current = 0.0;
            let mut scale = 0.0_f64;
            for a in 0..3 {
                let term = c[a] * k * (k * p.lengths[a]).cos() / p.l;
                current += term;
                scale = scale.max(term.abs());
                let end = c[a] * (k * p.lengths[a]).sin();
                worst = worst.max((end - f_j).abs() / f_j.abs().max(f64::MIN_POSITIVE));
            }
            let omega = self.omega[m];
            let load = (1.0 / p.l_j() - p.c_j * omega * omega) * f_j;
            worst = worst.max((current + load).abs() / scale.max(load.abs()));
        }
        worst
    }

    /// `φ^m/φ0` for each mode.
    pub fn phi_over_phi0(&self) -> [f64; 3] {
        self.phi_rms.map(|x| x / crate::units::REDUCED_FLUX_QUANTUM)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn null_vector_is_inverse_sine() {
        let p = CircuitParams::reference_device();
        let sol = solve_eigenmodes(&p).unwrap();
        for m in 0..3 {
            let k = sol.k[m];
            // Oracle: equal end fluxes force C_α ∝ 1/sin(kL_α).
            let oracle: Vec<f64> = p.lengths.iter().map(|len| 1.0 / (k * len).sin()).collect();
            let ratio = sol.coeffs[m][0] / oracle[0];
            for a in 1..3 {
                assert!((sol.coeffs[m][a] / oracle[a] - ratio).abs() < 1e-8 * ratio.abs());
            }
        }
    }

    #[test]
    fn shortcut_limit_gives_bare_modes() {
        // Tiny L_J: the junction end is grounded and each branch rings at πv/L.
        let p = CircuitParams { i_j: 1.0, c_j: 1e-18, ..CircuitParams::reference_device() };
        let sol = solve_eigenmodes(&p).unwrap();
        for tlr in Tlr::ALL {
            let bare = PI / p.length(tlr);
            assert!((sol.k[tlr.index()] - bare).abs() < 1e-4 * bare);
        }
        let f_a = sol.omega[0] / (2.0 * PI);
        assert!((f_a / 1e9 - 11.02).abs() < 0.01, "{f_a}");
    }

    #[test]
    fn overlap_formula() {
        let (a, b, len) = (3.0, 5.0, 0.7);
        let q = simpson(|x| (a * x).sin() * (b * x).sin(), 0.0, len, 10_000);
        assert!((sin_overlap(a, b, len) - q).abs() < 1e-12);
        let q = simpson(|x| (a * x).sin().powi(2), 0.0, len, 10_000);
        assert!((sin_overlap(a, a, len) - q).abs() < 1e-12);
    }

    #[test]
    fn residuals_are_small() {
        let p = CircuitParams::reference_device();
        let sol = solve_eigenmodes(&p).unwrap();
        assert!(sol.orthonormality_residual(&p) < 1e-8);
        assert!(sol.kirchhoff_residual(&p) < 1e-8);
        assert!(sol.f_junction.iter().all(|&f| f > 0.0));
        assert!(sol.ascending_k.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn esr_partition() {
        let p = CircuitParams::reference_device();
        let sol = solve_eigenmodes(&p).unwrap();
        for mode in Tlr::ALL {
            let total: f64 = Tlr::ALL.iter().map(|&t| esr(&sol, &p, mode, t)).sum();
            assert!(total < 1.0 && total > 0.99);
        }
    }
}
