//! Parallel vs sequential timing for the heavy inner loops.

use criterion::{criterion_group, criterion_main, Criterion};
use gammaforge_core::par;

fn bench_placeholder(c: &mut Criterion) {
    c.bench_function("noop", |b| {
        b.iter(|| par::maybe_par_range(0, 64, |i| i * i).len())
    });
}

criterion_group!(benches, bench_placeholder);
criterion_main!(benches);
