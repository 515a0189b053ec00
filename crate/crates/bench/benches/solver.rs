//! Hot numerical paths: the evolution right-hand side, the Helmholtz solve
//! and the Green-kernel reference convolution.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use gch_core::dynamics::{rhs, step_rk4};
use gch_core::model::{make_grid, InitialCondition, ModelParams};
use gch_core::spectral::SpectralWorkspace;
use std::hint::black_box;

fn setup(n: usize) -> (SpectralWorkspace, Vec<f64>, gch_core::model::FieldState) {
    let ws = SpectralWorkspace::new(20.0, n).unwrap();
    let grid = make_grid(20.0, n).unwrap();
    let state = InitialCondition::Gaussian { amplitude: 0.25, width: 1.0, center: 0.0 }
        .build(&grid, &ws)
        .unwrap();
    let u = state.u.clone();
    (ws, u, state)
}

fn bench_rhs(c: &mut Criterion) {
    let params = ModelParams { alpha: 1.0, beta: 0.1, gamma: 0.05, big_gamma: 0.2 };
    let mut group = c.benchmark_group("rhs");
    for n in [1024usize, 4096] {
        let (ws, u, _) = setup(n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| rhs(black_box(&u), &params, &ws, true).unwrap())
        });
    }
    group.finish();
}

fn bench_step(c: &mut Criterion) {
    let params = ModelParams { alpha: 1.0, ..ModelParams::ZERO };
    let mut group = c.benchmark_group("step_rk4");
    for n in [1024usize, 4096] {
        let (ws, _, state) = setup(n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| step_rk4(black_box(&state), 1e-3, &params, &ws, true).unwrap())
        });
    }
    group.finish();
}

fn bench_helmholtz(c: &mut Criterion) {
    let mut group = c.benchmark_group("helmholtz_invert");
    for n in [1024usize, 4096] {
        let (ws, u, _) = setup(n);
        let m = ws.helmholtz_apply(&u).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| ws.helmholtz_invert(black_box(&m)).unwrap())
        });
    }
    group.finish();
}

fn bench_green_convolve(c: &mut Criterion) {
    // quadrature reference route; expected orders slower than the spectral one
    let (ws, u, _) = setup(1024);
    let m = ws.helmholtz_apply(&u).unwrap();
    c.bench_function("green_convolve/1024", |b| {
        b.iter(|| ws.green_convolve(black_box(&m)).unwrap())
    });
}

criterion_group!(benches, bench_rhs, bench_step, bench_helmholtz, bench_green_convolve);
criterion_main!(benches);
