use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use sofia_bench::scaled_dataset;
use sofia_core::{
    best_delta_search, delta_measure, enumerate_closed_patterns, EnumerationConfig, Miner, ProjectionState,
    SofiaConfig,
};

fn sofia_fixed_theta(c: &mut Criterion) {
    let mut group = c.benchmark_group("sofia_theta");
    group.sample_size(10);
    for objects in [500, 1000, 2000] {
        let ds = scaled_dataset(objects);
        // Roughly the best Δ of these workloads, so the chain carries work.
        let theta = objects / 40;
        group.bench_with_input(BenchmarkId::from_parameter(objects), &ds, |b, ds| {
            b.iter(|| Miner::new(ds, SofiaConfig::new(theta)).run().unwrap().patterns.len())
        });
    }
    group.finish();
}

fn best_delta(c: &mut Criterion) {
    let mut group = c.benchmark_group("best_delta");
    group.sample_size(10);
    for objects in [1000, 4000] {
        let ds = scaled_dataset(objects);
        group.bench_with_input(BenchmarkId::from_parameter(objects), &ds, |b, ds| {
            b.iter(|| best_delta_search(ds, &SofiaConfig::new(1)).unwrap().theta)
        });
    }
    group.finish();
}

fn baseline(c: &mut Criterion) {
    let mut group = c.benchmark_group("baseline_capped");
    group.sample_size(10);
    let ds = scaled_dataset(1000);
    for min_support in [400, 200] {
        let cfg = EnumerationConfig { min_support, max_patterns: Some(200_000) };
        group.bench_with_input(BenchmarkId::from_parameter(min_support), &cfg, |b, cfg| {
            b.iter(|| enumerate_closed_patterns(&ds, cfg).unwrap().stats.emitted)
        });
    }
    group.finish();
}

fn delta_of_top(c: &mut Criterion) {
    let ds = scaled_dataset(4000);
    let identity = ProjectionState::identity(&ds);
    let top = ds.all_objects();
    c.bench_function("delta_top_4000", |b| b.iter(|| delta_measure(black_box(&top), &identity, &ds).unwrap()));
}

criterion_group!(benches, sofia_fixed_theta, best_delta, baseline, delta_of_top);
criterion_main!(benches);
