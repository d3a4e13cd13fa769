use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BatchSize, BenchmarkId, Criterion, Throughput};
use pimfunc::api::{build_evaluator, EvaluatorConfig, FunctionId, MethodId, MethodKind};
use pimfunc::harness::{run_workload, UniformSampler, WorkloadKind, WorkloadVariant};

const BATCH: usize = 4096;

fn inputs(function: FunctionId, kind: MethodKind) -> Vec<f32> {
    let (lo, hi) = pimfunc::api::default_sample_domain(function, kind);
    UniformSampler::new(1).samples(lo, hi, BATCH)
}

fn sine_methods(c: &mut Criterion) {
    let mut group = c.benchmark_group("sin");
    group.throughput(Throughput::Elements(BATCH as u64));
    for (kind, size) in [
        (MethodKind::Cordic, 28),
        (MethodKind::CordicLut, 28),
        (MethodKind::MLut, 1 << 14),
        (MethodKind::MLutInterp, 1 << 14),
        (MethodKind::LLut, 1 << 14),
        (MethodKind::LLutInterp, 1 << 14),
        (MethodKind::DLutInterp, 1 << 14),
        (MethodKind::DLLutInterp, 1 << 14),
    ] {
        let ev = build_evaluator(&EvaluatorConfig::new(
            FunctionId::Sin,
            MethodId::float(kind),
            size,
        ))
        .unwrap();
        let xs = inputs(FunctionId::Sin, kind);
        group.bench_function(kind.name(), |b| {
            b.iter(|| {
                xs.iter()
                    .map(|&x| ev.evaluate(black_box(x)).unwrap())
                    .sum::<f32>()
            })
        });
    }
    let fixed = MethodId::fixed(MethodKind::LLutInterp).unwrap();
    let ev = build_evaluator(&EvaluatorConfig::new(FunctionId::Sin, fixed, 1 << 14)).unwrap();
    let xs = inputs(FunctionId::Sin, MethodKind::LLutInterp);
    group.bench_function("llut-interp-fixed", |b| {
        b.iter(|| {
            xs.iter()
                .map(|&x| ev.evaluate(black_box(x)).unwrap())
                .sum::<f32>()
        })
    });
    group.finish();
}

fn cordic_iterations(c: &mut Criterion) {
    let mut group = c.benchmark_group("cordic-iterations");
    group.throughput(Throughput::Elements(BATCH as u64));
    let xs = inputs(FunctionId::Sin, MethodKind::Cordic);
    for n in [8, 16, 24, 30] {
        let config = EvaluatorConfig::new(FunctionId::Sin, MethodId::float(MethodKind::Cordic), n);
        let ev = build_evaluator(&config).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| {
                xs.iter()
                    .map(|&x| ev.evaluate(black_box(x)).unwrap())
                    .sum::<f32>()
            })
        });
    }
    group.finish();
}

fn other_functions(c: &mut Criterion) {
    let mut group = c.benchmark_group("functions");
    group.throughput(Throughput::Elements(BATCH as u64));
    for (function, kind, size) in [
        (FunctionId::Exp, MethodKind::LLutInterp, 1 << 14),
        (FunctionId::Exp, MethodKind::CordicLut, 28),
        (FunctionId::Log, MethodKind::LLutInterp, 1 << 14),
        (FunctionId::Log, MethodKind::Cordic, 28),
        (FunctionId::Sqrt, MethodKind::LLutInterp, 1 << 14),
        (FunctionId::Sqrt, MethodKind::Cordic, 28),
        (FunctionId::Tanh, MethodKind::DLLutInterp, 1 << 14),
        (FunctionId::Gelu, MethodKind::DLLutInterp, 1 << 14),
    ] {
        let ev =
            build_evaluator(&EvaluatorConfig::new(function, MethodId::float(kind), size)).unwrap();
        let xs = inputs(function, kind);
        group.bench_function(format!("{function}/{kind}"), |b| {
            b.iter(|| {
                xs.iter()
                    .map(|&x| ev.evaluate(black_box(x)).unwrap())
                    .sum::<f32>()
            })
        });
    }
    group.finish();
}

fn table_setup(c: &mut Criterion) {
    let mut group = c.benchmark_group("setup");
    for (kind, size) in [
        (MethodKind::Cordic, 28),
        (MethodKind::CordicLut, 28),
        (MethodKind::LLutInterp, 1 << 12),
        (MethodKind::LLutInterp, 1 << 16),
        (MethodKind::MLutInterp, 1 << 16),
    ] {
        let config = EvaluatorConfig::new(FunctionId::Sin, MethodId::float(kind), size);
        group.bench_with_input(BenchmarkId::new(kind.name(), size), &config, |b, config| {
            b.iter(|| build_evaluator(black_box(config)).unwrap())
        });
    }
    group.finish();
}

fn workloads(c: &mut Criterion) {
    let mut group = c.benchmark_group("workloads");
    group.sample_size(10);
    let n = 10_000;
    group.throughput(Throughput::Elements(n as u64));
    for kind in [
        WorkloadKind::Blackscholes,
        WorkloadKind::Sigmoid,
        WorkloadKind::Softmax,
    ] {
        for &variant in kind.variants() {
            let variant: WorkloadVariant = variant;
            group.bench_function(format!("{kind}/{variant}"), |b| {
                b.iter_batched(
                    || n,
                    |n| run_workload(kind, n, variant, 1).unwrap(),
                    BatchSize::SmallInput,
                )
            });
        }
    }
    group.finish();
}

criterion_group!(
    benches,
    sine_methods,
    cordic_iterations,
    other_functions,
    table_setup,
    workloads
);
criterion_main!(benches);
