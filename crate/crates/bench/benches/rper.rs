use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use mlsieve::rper::{rper, RperBudget};
use mlsieve::RperAlgo;
use mlsieve_bench::{field, rect};

fn algorithms(c: &mut Criterion) {
    let f = field();
    let budget = RperBudget::default();
    let mut group = c.benchmark_group("rper");
    for (k, n) in [(4, 12), (6, 14), (8, 16)] {
        let a = rect(k, n, 7);
        for algo in [RperAlgo::RectRyser, RperAlgo::Halves] {
            group.bench_with_input(BenchmarkId::new(algo.to_string(), format!("k{k}_n{n}")), &a, |b, a| {
                b.iter(|| rper(&f, a, algo, &budget).unwrap())
            });
        }
    }
    let a = rect(4, 8, 7);
    group.bench_function("oracle/k4_n8", |b| b.iter(|| rper(&f, &a, RperAlgo::Brute, &budget).unwrap()));
    group.finish();
}

criterion_group!(benches, algorithms);
criterion_main!(benches);
