use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use spiked_core::{
    critical_points, mp_cdf, mp_density, predict, sample_eigenvalues, support_complement, EntryDistribution, SpikeSpec,
    SpikedModel,
};

fn model(p: usize, n: usize) -> SpikedModel {
    let spikes = [SpikeSpec::new(4.0, 1), SpikeSpec::new(3.0, 1), SpikeSpec::new(0.1, 1)];
    SpikedModel::new(spikes, p, n).unwrap()
}

fn many_spikes(k: usize) -> SpikedModel {
    let spikes = (0..k).map(|i| SpikeSpec::new(4.0 + 2.0 * i as f64, 1));
    SpikedModel::new(spikes, 2000, 4000).unwrap()
}

fn limits(c: &mut Criterion) {
    let m = model(1000, 2000);
    c.bench_function("predict", |b| b.iter(|| predict(black_box(&m), 0.5).unwrap()));
}

fn support(c: &mut Criterion) {
    let mut g = c.benchmark_group("support");
    for k in [3, 10, 20] {
        let m = if k == 3 { model(1000, 2000) } else { many_spikes(k) };
        g.bench_with_input(BenchmarkId::new("critical_points", k), &m, |b, m| b.iter(|| critical_points(m).unwrap()));
        g.bench_with_input(BenchmarkId::new("support_complement", k), &m, |b, m| {
            b.iter(|| support_complement(m).unwrap())
        });
    }
    g.finish();
}

fn mplaw(c: &mut Criterion) {
    let xs: Vec<f64> = (0..1000).map(|i| 3.0 * i as f64 / 999.0).collect();
    c.bench_function("mp_density_1000", |b| b.iter(|| xs.iter().map(|&x| mp_density(black_box(x), 0.5)).sum::<f64>()));
    c.bench_function("mp_cdf_1000", |b| b.iter(|| xs.iter().map(|&x| mp_cdf(black_box(x), 0.5)).sum::<f64>()));
}

fn eigen(c: &mut Criterion) {
    let mut g = c.benchmark_group("sample_eigenvalues");
    g.sample_size(10);
    for (p, n) in [(100, 200), (400, 800), (400, 200)] {
        let m = model(p, n);
        g.bench_with_input(BenchmarkId::from_parameter(format!("{p}x{n}")), &m, |b, m| {
            b.iter(|| sample_eigenvalues(m, EntryDistribution::RealGaussian, 1).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, limits, support, mplaw, eigen);
criterion_main!(benches);
