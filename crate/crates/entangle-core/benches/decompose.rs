//! Criterion benches comparing the rayon data-parallel grid kernels with the
//! always-available sequential reference path.
//!
//! With the default `parallel` feature the `parallel` entries run on rayon;
//! built with `--no-default-features` both paths run sequentially and should
//! coincide.

use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use entangle_core::amplitudes::{pdc, unstable_amplitude, UnstableParams};
use entangle_core::cv::{coefficient_matrix, decompose};
use entangle_core::numerics::QuadratureRule;
use entangle_core::par;

fn amplitude_grid(c: &mut Criterion) {
    let amp = pdc(2.135, 7.455);
    let rule = QuadratureRule::gauss_hermite_unfolded(256, 0.0, 2f64.sqrt()).unwrap();
    let nodes = rule.nodes().to_vec();
    let n = nodes.len();

    let mut group = c.benchmark_group("pdc_amplitude_grid_256x256");
    group.sample_size(20);
    group.bench_function("parallel", |b| {
        b.iter(|| {
            let rows = par::map_indexed(n, |i| {
                let p = nodes[i];
                nodes.iter().map(|&q| amp.eval(p, q)).collect::<Vec<_>>()
            });
            black_box(rows)
        })
    });
    group.bench_function("sequential", |b| {
        b.iter(|| {
            let rows = par::map_indexed_seq(n, |i| {
                let p = nodes[i];
                nodes.iter().map(|&q| amp.eval(p, q)).collect::<Vec<_>>()
            });
            black_box(rows)
        })
    });
    group.finish();
}

fn unstable_grid(c: &mut Criterion) {
    let params = UnstableParams {
        t_tilde: 100.0,
        gamma_tilde: 0.015,
        ..UnstableParams::default()
    };
    let amp = unstable_amplitude(params);
    let rule = QuadratureRule::uniform_panel(0.0, 1.0, 400).unwrap();
    let nodes = rule.nodes().to_vec();
    let n = nodes.len();

    let mut group = c.benchmark_group("unstable_amplitude_grid_801x801");
    group.sample_size(10);
    group.bench_function("parallel", |b| {
        b.iter(|| {
            let rows = par::map_indexed(n, |i| {
                let p = nodes[i];
                nodes.iter().map(|&q| amp.eval(p, q)).collect::<Vec<_>>()
            });
            black_box(rows)
        })
    });
    group.bench_function("sequential", |b| {
        b.iter(|| {
            let rows = par::map_indexed_seq(n, |i| {
                let p = nodes[i];
                nodes.iter().map(|&q| amp.eval(p, q)).collect::<Vec<_>>()
            });
            black_box(rows)
        })
    });
    group.finish();
}

fn full_decomposition(c: &mut Criterion) {
    // end-to-end coefficient matrix + Schmidt decomposition at table scale;
    // the assembly inherits whichever execution mode the crate was built with
    let amp = pdc(2.135, 7.455);
    let setup = entangle_core::amplitudes::pdc_setup(1.0, 25).unwrap();

    let mut group = c.benchmark_group("pdc_schmidt_m0_25");
    group.sample_size(10);
    group.bench_function("coefficients_plus_decompose", |b| {
        b.iter(|| {
            let cm =
                coefficient_matrix(&amp, &setup.basis1, &setup.basis2, 25, 25, &setup.rule)
                    .unwrap();
            black_box(decompose(&cm).unwrap())
        })
    });
    group.finish();
}

criterion_group!(benches, amplitude_grid, unstable_grid, full_decomposition);
criterion_main!(benches);
