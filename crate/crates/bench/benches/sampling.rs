use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use outlierfreq_core::{compute_stats, DistributionSpec, RngState, SConvention};
use std::hint::black_box;

const DRAWS: usize = 10_000;

fn samplers(c: &mut Criterion) {
    let mut group = c.benchmark_group("fill");
    group.throughput(Throughput::Elements(DRAWS as u64));
    for spec in [
        "gaussian",
        "cauchy",
        "laplace",
        "stable:1.5",
        "stable:1",
        "skewed:1.5:0.5",
    ] {
        let sampler = spec.parse::<DistributionSpec>().unwrap().sampler().unwrap();
        let mut rng = RngState::new(1, 0);
        let mut buf = vec![0.0; DRAWS];
        group.bench_function(BenchmarkId::from_parameter(spec), |b| {
            b.iter(|| {
                sampler.fill(&mut rng, &mut buf);
                black_box(buf[DRAWS - 1])
            })
        });
    }
    group.finish();
}

fn stats(c: &mut Criterion) {
    let sampler = DistributionSpec::cauchy().sampler().unwrap();
    let x = sampler.sample(&mut RngState::new(2, 0), DRAWS).unwrap();
    let mut group = c.benchmark_group("compute_stats");
    group.throughput(Throughput::Elements(DRAWS as u64));
    group.bench_function("sqrt-biased", |b| {
        b.iter(|| compute_stats(black_box(&x), SConvention::SqrtBiased).unwrap())
    });
    group.finish();
}

criterion_group!(benches, samplers, stats);
criterion_main!(benches);
