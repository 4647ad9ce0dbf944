use std::f64::consts::PI;
use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use lieb_bench::{default_lattice, default_pumps};
use lieb_core::units::{ghz_to_angular, mhz_to_angular};
use lieb_core::{band_grid, build_lieb, butterfly, linspace, localization_sweep, make_pump, steady_state, PumpKind};

fn lattice(c: &mut Criterion) {
    let spec = default_lattice();
    c.bench_function("build_lieb 12x12", |b| b.iter(|| build_lieb(black_box(&spec)).unwrap()));

    let h = build_lieb(&spec).unwrap();
    c.bench_function("eigenvalues 432", |b| b.iter(|| black_box(&h).eigenvalues()));

    let pumps = default_pumps();
    let cfg = make_pump(PumpKind::Rm1, pumps.anchor, pumps.t_p, pumps.kappa, &spec).unwrap();
    c.bench_function("steady_state 432", |b| b.iter(|| steady_state(black_box(&h), black_box(&cfg)).unwrap()));

    c.bench_function("band_grid 64", |b| {
        b.iter(|| band_grid(64, black_box(mhz_to_angular(10.0)), mhz_to_angular(0.6)).unwrap())
    });

    let mut slow = c.benchmark_group("sweeps");
    slow.sample_size(10);
    let thetas = linspace(0.0, PI, 11);
    slow.bench_function("butterfly 12x12 x11", |b| {
        b.iter(|| butterfly(12, 12, mhz_to_angular(10.0), mhz_to_angular(0.6), black_box(&thetas)).unwrap())
    });
    let grid = linspace(0.0, mhz_to_angular(80.0), 5);
    slow.bench_function("localization_sweep x5", |b| {
        b.iter(|| localization_sweep(black_box(&grid), ghz_to_angular(2.0), &spec, &pumps).unwrap())
    });
    slow.finish();
}

criterion_group!(benches, lattice);
criterion_main!(benches);
