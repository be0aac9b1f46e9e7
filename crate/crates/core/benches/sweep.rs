use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use redei_core::verify;
use redei_core::Execution;

fn sweeps(c: &mut Criterion) {
    let mut group = c.benchmark_group("sweep");
    group.sample_size(10);
    for exec in [Execution::Sequential, Execution::Parallel] {
        let label = format!("{exec:?}");
        group.bench_with_input(BenchmarkId::new("oracle", &label), &exec, |b, &e| {
            b.iter(|| verify::oracle_equivalence(120, e))
        });
        group.bench_with_input(BenchmarkId::new("theorem", &label), &exec, |b, &e| {
            b.iter(|| verify::theorem_equivalence(200, e))
        });
        group.bench_with_input(BenchmarkId::new("symmetries", &label), &exec, |b, &e| {
            b.iter(|| verify::symmetries(100, e))
        });
    }
    group.finish();
}

criterion_group!(benches, sweeps);
criterion_main!(benches);
