use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use hopf_cstar::haagerup::{haagerup_bounds_of, HaagerupOptions};
use hopf_cstar_bench::{gap_tensor, spread_tensor};
use std::hint::black_box;

fn bounds(c: &mut Criterion) {
    let opts = HaagerupOptions::default();
    let mut group = c.benchmark_group("haagerup_bounds");
    group.sample_size(20);
    let gap = gap_tensor();
    group.bench_function("gap", |b| b.iter(|| haagerup_bounds_of(black_box(&gap), &opts).unwrap()));
    for (label, dims, rank) in [("M2", vec![2], 3), ("C3", vec![1, 1, 1], 3), ("C+M2", vec![1, 2], 4), ("M3", vec![3], 6)] {
        let x = spread_tensor(&dims, rank);
        group.bench_with_input(BenchmarkId::new("spread", label), &x, |b, x| {
            b.iter(|| haagerup_bounds_of(black_box(x), &opts).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bounds);
criterion_main!(benches);
