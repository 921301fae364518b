//! Sequential versus rayon execution of the batch workloads.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use inerton_core::action::{cyclic_action_batch, OscillatorSpec};
use inerton_core::dynamics::closed_form_trajectory;
use inerton_core::lagrangian::{
    el_residual_with, AggregateLagrangian, Coordinate, Parametrization, DEFAULT_FD_STEP,
};
use inerton_core::verify::run_checks_with;
use inerton_core::{Execution, SystemParams};

const MODES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn check_registry(c: &mut Criterion) {
    let p = SystemParams::natural();
    let mut group = c.benchmark_group("check_registry");
    group.sample_size(20);
    for (name, exec) in MODES {
        group.bench_function(name, |b| {
            b.iter(|| run_checks_with::<&str>(exec, &[], black_box(&p), 42).unwrap())
        });
    }
    group.finish();
}

fn action_batch(c: &mut Criterion) {
    let mut group = c.benchmark_group("cyclic_action_batch");
    for n in [1_000usize, 10_000] {
        let specs: Vec<_> = (0..n)
            .map(|k| OscillatorSpec::new(1.0 + k as f64 * 1e-3, 0.5, 1.0).unwrap())
            .collect();
        for (name, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(name, n), &specs, |b, specs| {
                b.iter(|| cyclic_action_batch(exec, black_box(specs), 64))
            });
        }
    }
    group.finish();
}

fn el_residual(c: &mut Criterion) {
    let p = SystemParams::natural();
    let traj = closed_form_trajectory(&p, 3.0, 4000).unwrap();
    let l = AggregateLagrangian { params: p };
    let mut group = c.benchmark_group("el_residual");
    for (name, exec) in MODES {
        group.bench_function(name, |b| {
            b.iter(|| {
                el_residual_with(
                    exec,
                    &l,
                    black_box(&traj),
                    Coordinate::Particle,
                    DEFAULT_FD_STEP,
                    Parametrization::Natural,
                )
                .unwrap()
            })
        });
    }
    group.finish();
}

criterion_group!(benches, check_registry, action_batch, el_residual);
criterion_main!(benches);
