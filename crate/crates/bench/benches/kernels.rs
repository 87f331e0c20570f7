use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use gbbm_core::resonance::{find_roots_with, ScanOptions};
use gbbm_core::{
    classify_pair, free_evolve, make_grid, phase, phase_gradient, CoeffPair, PhasePoint, RunConfig,
    Solver, SolverState,
};

fn dispersion(c: &mut Criterion) {
    let p = PhasePoint::new([0.3, -1.7, 2.2, 5.0], 0.9);
    c.bench_function("phase", |b| b.iter(|| phase(black_box(&p))));
    c.bench_function("phase_gradient", |b| {
        b.iter(|| phase_gradient(black_box(&p)))
    });
}

fn resonance(c: &mut Criterion) {
    let pair = CoeffPair::new(4, -1).unwrap();
    c.bench_function("classify_pair (4,-1)", |b| {
        b.iter(|| classify_pair(black_box(pair)))
    });
    let coarse = ScanOptions {
        points: 10_000,
        refine_points: 1_000,
        ..ScanOptions::default()
    };
    c.bench_function("find_roots (2,-1) 10k", |b| {
        b.iter(|| find_roots_with(black_box(CoeffPair::new(2, -1).unwrap()), &coarse))
    });
}

fn spectral(c: &mut Criterion) {
    let mut group = c.benchmark_group("solver");
    for n in [1024usize, 4096] {
        let cfg = RunConfig {
            n,
            ..RunConfig::default()
        };
        let grid = make_grid(n, cfg.length).unwrap();
        let f0 = cfg.initial_profile(&grid);
        let solver = Solver::new(&grid, 3, true).unwrap();
        group.bench_with_input(BenchmarkId::new("free_evolve", n), &f0, |b, f| {
            b.iter(|| free_evolve(black_box(f), 37.5))
        });
        group.bench_with_input(BenchmarkId::new("dealiased_quintic", n), &f0, |b, f| {
            b.iter(|| solver.dealiased_quintic(black_box(&f.coeffs)))
        });
        let state = SolverState {
            t: 1.0,
            profile: f0.clone(),
        };
        group.bench_with_input(BenchmarkId::new("rk4_step", n), &state, |b, s| {
            b.iter(|| solver.step(black_box(s), 0.1).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, dispersion, resonance, spectral);
criterion_main!(benches);
