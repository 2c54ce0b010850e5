use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use wfa_aak::ensemble::{self, EnsembleConfig};
use wfa_aak::par::Execution;

fn ensemble(c: &mut Criterion) {
    let cfg = EnsembleConfig::default();
    let mut group = c.benchmark_group("ensemble");
    group.sample_size(10);
    for seeds in [16u64, 64] {
        let seeds: Vec<u64> = (0..seeds).collect();
        for exec in [Execution::Sequential, Execution::Parallel] {
            group.bench_with_input(
                BenchmarkId::new(format!("{exec:?}").to_lowercase(), seeds.len()),
                &seeds,
                |b, s| b.iter(|| ensemble::run(black_box(s), &cfg, exec)),
            );
        }
    }
    group.finish();
}

criterion_group!(benches, ensemble);
criterion_main!(benches);
