//! Sequential against data-parallel execution on the three hot paths.
//! Build with `--no-default-features` to measure the fallback alone.

use std::hint::black_box;

use citenorm_core::fairness::calibration_with;
use citenorm_core::indicators::compute_table_with;
use citenorm_core::synth::generate_with;
use citenorm_core::{generate, paper2010_profile, Counting, Execution, IndicatorSpec, Window};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

const MODES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn indicators(c: &mut Criterion) {
    let dataset = generate(&paper2010_profile()).unwrap();
    let spec = IndicatorSpec::impact_factor(Window::Five, Counting::Fractional).unwrap();
    let mut group = c.benchmark_group("compute_table");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::new("IF5-FC", name), |b| {
            b.iter(|| compute_table_with(black_box(&dataset), &spec, exec))
        });
    }
    group.finish();
}

fn calibrate(c: &mut Criterion) {
    let sizes: Vec<usize> = paper2010_profile().clusters.iter().map(|c| c.size).collect();
    let mut group = c.benchmark_group("calibration");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::new("2000 trials", name), |b| {
            b.iter(|| calibration_with(black_box(&sizes), 2000, 10.0, 0.9, 1, exec).unwrap())
        });
    }
    group.finish();
}

fn synthesize(c: &mut Criterion) {
    let mut profile = paper2010_profile();
    for cluster in &mut profile.clusters {
        cluster.size = cluster.size.div_ceil(4);
    }
    let mut group = c.benchmark_group("generate");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::new("quarter profile", name), |b| {
            b.iter(|| generate_with(black_box(&profile), exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, indicators, calibrate, synthesize);
criterion_main!(benches);
