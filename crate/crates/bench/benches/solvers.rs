use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use kreinkit::ball;
use kreinkit::fixpoint::{self, FixpointOptions};
use kreinkit::mnps::{self, MnpsOptions};
use kreinkit::qpd;
use kreinkit_bench as inputs;

fn bench_mnps(c: &mut Criterion) {
    let mut group = c.benchmark_group("mnps_strong");
    group.sample_size(10);
    for (k, m) in [(2, 10), (3, 50), (5, 100)] {
        let a = inputs::strongly_dissipative(k, m);
        let opts = MnpsOptions::default();
        group.bench_with_input(
            BenchmarkId::from_parameter(format!("{k}x{m}")),
            &a,
            |b, a| b.iter(|| mnps::mnps_strong(a, &opts).unwrap()),
        );
    }
    group.finish();
}

fn bench_mobius(c: &mut Criterion) {
    let mut group = c.benchmark_group("mobius_apply");
    for (k, m) in [(1, 4), (4, 20)] {
        let (a, x) = inputs::ball_pair(k, m);
        group.bench_function(format!("{k}x{m}"), |b| {
            b.iter(|| ball::mobius_apply(&a, &x).unwrap())
        });
    }
    group.finish();
}

fn bench_fixpoint(c: &mut Criterion) {
    let mut group = c.benchmark_group("common_fixed_point");
    let opts = FixpointOptions::default();
    for name in ["S3", "D4", "Q8"] {
        let rep = inputs::conjugated_rep(name, 2, 6);
        group.bench_function(name, |b| {
            b.iter(|| fixpoint::common_fixed_point(&rep, &opts).unwrap())
        });
    }
    group.finish();
}

fn bench_qpd(c: &mut Criterion) {
    let mut group = c.benchmark_group("qpd_decompose");
    let opts = FixpointOptions::default();
    for name in ["S3", "D6", "Z2xZ2xZ2"] {
        let phi = inputs::qpd_function(name, 2);
        group.bench_function(name, |b| {
            b.iter(|| qpd::decompose(&phi, &opts, 1e-8).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_mnps, bench_mobius, bench_fixpoint, bench_qpd);
criterion_main!(benches);
