use std::f64::consts::PI;

use nalgebra::DVector;
use num_complex::Complex64;
use proptest::prelude::*;

use lieb_core::{
    band_grid, bloch_hamiltonian, build_lieb, esr, flatness, interference_residual, plaquette_flux, ring_mode,
    solve_eigenmodes, steady_state, Boundary, CircuitParams, LiebLatticeSpec, PumpConfig, RingModeKind, SiteIndex,
    StateVector, Tlr,
};

fn spec_strategy() -> impl Strategy<Value = LiebLatticeSpec> {
    (1usize..=4, 1usize..=4, 0.5f64..2.0, 0.0f64..(2.0 * PI), 0.0f64..0.3)
        .prop_map(|(nx, ny, t, theta, tp)| LiebLatticeSpec::new(nx, ny, t).with_gauge(theta).with_nnn(tp))
}

fn sorted_eigs(spec: &LiebLatticeSpec) -> Vec<f64> {
    build_lieb(spec).unwrap().eigenvalues()
}

fn complex_vec(values: &[(f64, f64)]) -> DVector<Complex64> {
    DVector::from_iterator(values.len(), values.iter().map(|&(re, im)| Complex64::new(re, im)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hamiltonian_is_hermitian(spec in spec_strategy()) {
        let h = build_lieb(&spec).unwrap();
        prop_assert!(h.hermitian_defect() <= 1e-14 * spec.hopping);
    }

    #[test]
    fn spectrum_is_chiral_without_nnn(spec in spec_strategy()) {
        let e = sorted_eigs(&LiebLatticeSpec { nnn_tprime: 0.0, ..spec });
        let n = e.len();
        for i in 0..n {
            prop_assert!((e[i] + e[n - 1 - i]).abs() <= 1e-10 * spec.hopping);
        }
    }

    #[test]
    fn spectrum_is_gauge_invariant(
        spec in spec_strategy(),
        chi in proptest::collection::vec(-PI..PI, 48),
    ) {
        let h = build_lieb(&spec).unwrap();
        let g = h.gauge_transformed(&chi[..spec.dim()]).unwrap();
        let (a, b) = (h.eigenvalues(), g.eigenvalues());
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() <= 1e-10 * spec.hopping);
        }
        if spec.nx >= 2 && spec.ny >= 2 {
            let anchor = SiteIndex::a(1, 1);
            let d = (plaquette_flux(&h, anchor).unwrap() - plaquette_flux(&g, anchor).unwrap()).rem_euclid(2.0 * PI);
            prop_assert!(d.min(2.0 * PI - d) <= 1e-10);
        }
    }

    #[test]
    fn response_is_linear_in_pump(
        spec in spec_strategy(),
        raw in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 48),
        kappa in 0.05f64..0.5,
        alpha in (-2.0f64..2.0, -2.0f64..2.0),
    ) {
        let h = build_lieb(&spec).unwrap();
        let cfg = PumpConfig::new(complex_vec(&raw[..spec.dim()]), kappa, &spec).unwrap();
        let alpha = Complex64::new(alpha.0, alpha.1);
        let base = steady_state(&h, &cfg).unwrap().amplitudes;
        let scaled = steady_state(&h, &cfg.scaled(alpha)).unwrap().amplitudes;
        let err = (&scaled - base.map(|z| z * alpha)).norm();
        prop_assert!(err <= 1e-10 * (1.0 + base.norm() * alpha.norm()));
    }

    #[test]
    fn shifting_theta_by_pi_is_invisible_without_nnn(spec in spec_strategy()) {
        let flat = LiebLatticeSpec { nnn_tprime: 0.0, ..spec };
        let shifted = flat.with_gauge((flat.gauge_theta + PI).rem_euclid(2.0 * PI));
        for (x, y) in sorted_eigs(&flat).iter().zip(&sorted_eigs(&shifted)) {
            prop_assert!((x - y).abs() <= 1e-9 * spec.hopping);
        }
    }

    #[test]
    fn reflecting_theta_keeps_spectrum(spec in spec_strategy()) {
        let mirrored = spec.with_gauge((2.0 * PI - spec.gauge_theta).rem_euclid(2.0 * PI));
        for (x, y) in sorted_eigs(&spec).iter().zip(&sorted_eigs(&mirrored)) {
            prop_assert!((x - y).abs() <= 1e-9 * spec.hopping);
        }
    }

    #[test]
    fn torus_matches_bloch_bands(nx in 2usize..=5, ny in 2usize..=5, t in 0.5f64..2.0, tp in 0.0f64..0.3) {
        let spec = LiebLatticeSpec::new(nx, ny, t).with_nnn(tp).with_boundary(Boundary::Periodic);
        let real = sorted_eigs(&spec);
        let mut bloch = Vec::with_capacity(real.len());
        for p in 0..nx {
            for q in 0..ny {
                let k = (2.0 * PI * p as f64 / nx as f64, 2.0 * PI * q as f64 / ny as f64);
                bloch.extend(bloch_hamiltonian(k, t, tp).eigenvalues());
            }
        }
        bloch.sort_by(f64::total_cmp);
        for (x, y) in real.iter().zip(&bloch) {
            prop_assert!((x - y).abs() <= 1e-10 * t, "{x} vs {y}");
        }
    }

    #[test]
    fn ring_mode_superpositions_stay_in_kernel(
        anchors in proptest::collection::vec((1usize..=5, 1usize..=5, -1.0f64..1.0), 1..5),
        kick in 0usize..108,
    ) {
        let spec = LiebLatticeSpec::new(6, 6, 1.0);
        let h = build_lieb(&spec).unwrap();
        let mut psi = DVector::<Complex64>::zeros(spec.dim());
        for &(m, n, w) in &anchors {
            psi += ring_mode(RingModeKind::Rm1, SiteIndex::a(m, n), &spec).unwrap().0 * Complex64::new(w, 0.0);
        }
        if psi.norm() > 1e-6 {
            prop_assert!(interference_residual(&StateVector(psi.clone()), &h).unwrap() <= 1e-12);
        }
        // A single excited site always has a neighbour that sees it.
        let site = StateVector::basis(spec.dim(), kick);
        prop_assert!(interference_residual(&site, &h).unwrap() > 0.5);
    }
}

#[test]
fn middle_band_widens_with_tprime() {
    let widths: Vec<f64> = [0.0, 0.05, 0.1, 0.2, 0.4]
        .iter()
        .map(|&tp| flatness(&band_grid(33, 1.0, tp).unwrap(), 1).unwrap().width)
        .collect();
    assert!(widths[0] < 1e-12);
    assert!(widths.windows(2).all(|w| w[0] < w[1]), "{widths:?}");
}

#[test]
fn circuit_trends_with_critical_current() {
    let currents = [5e-6, 10e-6, 15e-6, 20e-6, 25e-6, 30e-6];
    let mut prev: Option<([f64; 3], [f64; 3])> = None;
    for &i_j in &currents {
        let p = CircuitParams { i_j, ..CircuitParams::reference_device() };
        let sol = solve_eigenmodes(&p).unwrap();
        let esrs = Tlr::ALL.map(|m| esr(&sol, &p, m, m));
        if let Some((omega, e)) = prev {
            for m in 0..3 {
                assert!(sol.omega[m] > omega[m], "frequency of mode {m} at {i_j}");
                assert!(esrs[m] > e[m], "ESR of mode {m} at {i_j}");
            }
        }
        prev = Some((sol.omega, esrs));
    }
}
