use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use mlsieve::solvers::{depth3_mlc, mlc_count, mmd, MlcOptions, MmdConfig, MmdScheme};
use mlsieve::RperAlgo;
use mlsieve_bench::{circuit, field, sps};

fn mlc(c: &mut Criterion) {
    let f = field();
    let g = circuit(10, 40, 3);
    let mut group = c.benchmark_group("mlc");
    group.sample_size(20);
    for k in [3, 5] {
        for algo in [RperAlgo::RectRyser, RperAlgo::Halves] {
            let opts = MlcOptions { algo, ..Default::default() };
            group.bench_with_input(BenchmarkId::new(algo.to_string(), k), &k, |b, &k| b.iter(|| mlc_count(&f, &g, k, &opts).unwrap()));
        }
    }
    group.finish();
}

fn detection(c: &mut Criterion) {
    let g = circuit(10, 30, 5);
    let mut group = c.benchmark_group("mmd");
    group.sample_size(10);
    for scheme in [MmdScheme::Basic, MmdScheme::Fast] {
        let cfg = MmdConfig { scheme, ..Default::default() };
        group.bench_function(scheme.to_string(), |b| b.iter(|| mmd(&g, 3, &cfg).unwrap()));
    }
    group.finish();
}

fn depth3(c: &mut Criterion) {
    let f = field();
    let mut group = c.benchmark_group("depth3_mlc");
    for k in [4, 6, 8] {
        let p = sps(16, k, 2, 9);
        group.bench_with_input(BenchmarkId::from_parameter(k), &p, |b, p| b.iter(|| depth3_mlc(&f, p).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, mlc, detection, depth3);
criterion_main!(benches);
