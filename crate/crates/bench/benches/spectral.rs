use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use cyllab_bench::{boundary_data, cylinder, nonlinear_model, quick_family, sequence};
use cyllab_core::degeneration::run_family;
use cyllab_core::estimates::gamma_profile;
use cyllab_core::solve::DEFAULT_TOL;
use cyllab_core::{homogeneous, solve_nonlinear, VectorFieldModel};

fn linear(c: &mut Criterion) {
    let cyl = cylinder(10.0, 2048, 64);
    let b = boundary_data();
    c.bench_function("homogeneous r=10 S=2048 T=64", |bench| bench.iter(|| homogeneous(black_box(cyl), &b).unwrap()));
}

fn nonlinear(c: &mut Criterion) {
    let cyl = cylinder(5.0, 1024, 32);
    let b = boundary_data();
    let affine = VectorFieldModel::scalar(0.5, 4);
    let model = nonlinear_model();
    let mut g = c.benchmark_group("solve_nonlinear r=5 S=1024 T=32");
    g.sample_size(10);
    g.bench_function("affine", |bench| bench.iter(|| solve_nonlinear(cyl, &b, &affine, 0.05, DEFAULT_TOL).unwrap()));
    g.bench_function("gradient with quadratic terms", |bench| {
        bench.iter(|| solve_nonlinear(cyl, &b, &model, 0.05, DEFAULT_TOL).unwrap())
    });
    g.finish();
}

fn estimates(c: &mut Criterion) {
    let cyl = cylinder(5.0, 1024, 32);
    let (u, _) = solve_nonlinear(cyl, &boundary_data(), &nonlinear_model(), 0.05, DEFAULT_TOL).unwrap();
    c.bench_function("gamma_profile r=5 S=1024 T=32", |bench| bench.iter(|| gamma_profile(black_box(&u))));
}

fn family(c: &mut Criterion) {
    let (schedule, opts) = quick_family();
    let (b, seq) = (boundary_data(), sequence());
    let mut g = c.benchmark_group("family");
    g.sample_size(10);
    g.bench_function("quick profile", |bench| bench.iter(|| run_family(&schedule, &b, &seq, &opts).unwrap()));
    g.finish();
}

criterion_group!(benches, linear, nonlinear, estimates, family);
criterion_main!(benches);
