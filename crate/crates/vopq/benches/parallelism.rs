//! Parallel vs sequential throughput for the Monte-Carlo engines and the
//! yield-surface sweep.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use vopq::analysis::{kmax_grid_with, DetectionStrategy};
use vopq::channel::LossModel;
use vopq::hilbert::PureState;
use vopq::protocol::{run_with, Encoding, EveMode, ProtocolConfig, ProtocolKind};
use vopq::Parallelism;

fn b92_config(n_signals: u64) -> ProtocolConfig {
    ProtocolConfig {
        protocol: ProtocolKind::B92 {
            psi0: PureState::new(std::f64::consts::FRAC_PI_8, 0.0).unwrap(),
            psi1: PureState::new(-std::f64::consts::FRAC_PI_8, 0.0).unwrap(),
            detection: DetectionStrategy::Pvm,
        },
        encoding: Encoding::Vopq,
        loss: LossModel::from_gamma(0.1).unwrap(),
        eve: EveMode::Absent,
        n_signals,
        seed: 7,
    }
}

fn bb84_config(n_signals: u64) -> ProtocolConfig {
    ProtocolConfig {
        protocol: ProtocolKind::Bb84,
        encoding: Encoding::Vopq,
        loss: LossModel::lossless(),
        eve: EveMode::Absent,
        n_signals,
        seed: 7,
    }
}

fn bench_protocol_runs(c: &mut Criterion) {
    let mut group = c.benchmark_group("protocol_run");
    for (name, config) in [("b92_pvm", b92_config(200_000)), ("bb84_vopq", bb84_config(200_000))] {
        group.bench_with_input(BenchmarkId::new(name, "parallel"), &config, |b, cfg| {
            b.iter(|| run_with(cfg, Parallelism::Auto).unwrap())
        });
        group.bench_with_input(BenchmarkId::new(name, "sequential"), &config, |b, cfg| {
            b.iter(|| run_with(cfg, Parallelism::Sequential).unwrap())
        });
    }
    group.finish();
}

fn bench_kmax_sweep(c: &mut Criterion) {
    let mut group = c.benchmark_group("kmax_grid_201");
    group.bench_function("parallel", |b| {
        b.iter(|| kmax_grid_with(201, DetectionStrategy::Povm, Parallelism::Auto).unwrap())
    });
    group.bench_function("sequential", |b| {
        b.iter(|| kmax_grid_with(201, DetectionStrategy::Povm, Parallelism::Sequential).unwrap())
    });
    group.finish();
}

criterion_group!(benches, bench_protocol_runs, bench_kmax_sweep);
criterion_main!(benches);
