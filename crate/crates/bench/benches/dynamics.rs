use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use zenoclone_bench::open_fixture;
use zenoclone_core::dynamics::{evolve_lindblad, evolve_schrodinger, IntegratorConfig};
use zenoclone_core::experiments::{run_fig2a, run_fig4};
use zenoclone_core::model::{build_h_i, build_h_laser};
use zenoclone_core::zeno::{analytic_state, zeno_projected_hamiltonian};

fn closed(c: &mut Criterion) {
    let mut group = c.benchmark_group("schrodinger");
    for n in [3, 6] {
        let f = open_fixture(n);
        group.bench_with_input(BenchmarkId::new("expm", n), &f, |b, f| {
            b.iter(|| {
                evolve_schrodinger(&f.h, &f.psi0, black_box(f.t0), &IntegratorConfig::expm())
                    .unwrap()
            })
        });
        group.bench_with_input(BenchmarkId::new("analytic", n), &f, |b, f| {
            b.iter(|| analytic_state(&f.params, black_box(f.t0)).unwrap())
        });
    }
    group.finish();
}

fn open(c: &mut Criterion) {
    let mut group = c.benchmark_group("lindblad");
    group.sample_size(10);
    for n in [3, 4] {
        let f = open_fixture(n);
        group.bench_with_input(BenchmarkId::new("rk4", n), &f, |b, f| {
            b.iter(|| {
                evolve_lindblad(
                    &f.h,
                    &f.ops,
                    &f.rho0,
                    black_box(f.t0),
                    &IntegratorConfig::rk4(),
                )
                .unwrap()
            })
        });
        group.bench_with_input(BenchmarkId::new("expm", n), &f, |b, f| {
            b.iter(|| {
                evolve_lindblad(
                    &f.h,
                    &f.ops,
                    &f.rho0,
                    black_box(f.t0),
                    &IntegratorConfig::expm(),
                )
                .unwrap()
            })
        });
    }
    group.finish();
}

fn projection(c: &mut Criterion) {
    let f = open_fixture(5);
    let hi = build_h_i(&f.params).unwrap();
    let hl = build_h_laser(&f.params).unwrap();
    c.bench_function("zeno_projection_n5", |b| {
        b.iter(|| zeno_projected_hamiltonian(&hi, &hl, None).unwrap())
    });
}

fn scenarios(c: &mut Criterion) {
    let mut group = c.benchmark_group("scenarios");
    group.sample_size(10);
    group.bench_function("fig2a_grid11", |b| {
        b.iter(|| run_fig2a(black_box(11)).unwrap())
    });
    group.bench_function("fig4_grid5", |b| b.iter(|| run_fig4(black_box(5)).unwrap()));
    group.finish();
}

criterion_group!(benches, closed, open, projection, scenarios);
criterion_main!(benches);
