//! Sequential scan (one worker) against the rayon scan (all cores) on the
//! same games. Without the `parallel` feature both rows run sequentially.

use std::time::Duration;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use og_core::stdgames::{cournot, stackelberg, CournotParams};
use og_core::{equilibria, ClosedGame, FiniteType, Scaled, SearchConfig};

fn cores() -> usize {
    std::thread::available_parallelism().map_or(2, |n| n.get().max(2))
}

fn compare(c: &mut Criterion, name: &str, g: &ClosedGame, samples: usize) {
    let mut group = c.benchmark_group(name);
    group.sample_size(samples).measurement_time(Duration::from_secs(20));
    for workers in [1, cores()] {
        let cfg = SearchConfig::default().with_workers(workers);
        group.bench_with_input(BenchmarkId::new("workers", workers), &cfg, |b, cfg| {
            b.iter(|| equilibria(g, cfg).unwrap())
        });
    }
    group.finish();
}

fn bench(c: &mut Criterion) {
    let p = CournotParams { a: 25.0, b: 1.0, c: 1.0, grid: FiniteType::int_range(0, 24).unwrap() };
    compare(c, "cournot_25", &cournot(&p).unwrap(), 30);

    let grid = FiniteType::num_set([0, 2, 3, 4, 6].map(Scaled::from_int)).unwrap();
    let p = CournotParams { a: 13.0, b: 1.0, c: 1.0, grid };
    compare(c, "stackelberg", &stackelberg(&p).unwrap(), 10);
}

criterion_group!(benches, bench);
criterion_main!(benches);
