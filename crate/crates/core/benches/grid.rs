//! Sequential (`jobs = 1`) against the rayon pool on the two grid sweeps.
//! Build with `--no-default-features` to bench the sequential-only build.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use schmidt_core::discovery::{integrality_scan, NoStore};
use schmidt_core::families::{FamilyId, FamilySpec};
use schmidt_core::grid::parallel_enabled;
use schmidt_core::verify::{verify_classical_grid, verify_q_grid};

fn worker_counts() -> Vec<usize> {
    // On a single core the pool run measures scheduling overhead only.
    let cores = std::thread::available_parallelism().map_or(1, |n| n.get());
    if parallel_enabled() {
        vec![1, cores.max(2)]
    } else {
        vec![1]
    }
}

fn verify_grids(c: &mut Criterion) {
    let mut group = c.benchmark_group("verify");
    group.sample_size(10);
    let classical = FamilySpec::new(FamilyId::ShiftedSchmidt { c: 2 });
    let q = FamilySpec::new(FamilyId::QShiftedSchmidt { c: 1 });
    for jobs in worker_counts() {
        group.bench_with_input(
            BenchmarkId::new("classical k,i<=10", jobs),
            &jobs,
            |b, &jobs| {
                b.iter(|| verify_classical_grid(black_box(&classical), 10, 10, jobs).unwrap())
            },
        );
        group.bench_with_input(BenchmarkId::new("q k,i<=5", jobs), &jobs, |b, &jobs| {
            b.iter(|| verify_q_grid(black_box(&q), 5, 5, jobs).unwrap())
        });
    }
    group.finish();
}

fn scan(c: &mut Criterion) {
    let mut group = c.benchmark_group("scan");
    group.sample_size(10);
    for jobs in worker_counts() {
        group.bench_with_input(
            BenchmarkId::new("d=3 k,i<=8 r<=3", jobs),
            &jobs,
            |b, &jobs| b.iter(|| integrality_scan(black_box(3), 8, 8, 3, jobs, &NoStore).unwrap()),
        );
    }
    group.finish();
}

criterion_group!(benches, verify_grids, scan);
criterion_main!(benches);
