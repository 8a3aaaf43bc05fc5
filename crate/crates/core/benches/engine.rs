//! Sequential against parallel execution on the dimension-three canonical run.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use fano_forge::classify::{classify_all, enumerate_weight_vectors, Options};
use fano_forge::fine::fine_interior_of_columns;
use fano_forge::singtest::Mode;
use fano_forge::Execution;

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn weights(c: &mut Criterion) {
    let mut g = c.benchmark_group("weights_dim3_canonical");
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| enumerate_weight_vectors(3, Mode::Canonical, exec))
        });
    }
    g.finish();
}

fn classify(c: &mut Criterion) {
    let mut g = c.benchmark_group("classify_dim3_canonical");
    g.sample_size(10);
    for (name, exec) in MODES {
        let opts = Options { exec, ..Options::default() };
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| classify_all(3, Mode::Canonical, &opts).unwrap())
        });
    }
    g.finish();
}

fn fine(c: &mut Criterion) {
    let opts = Options::default();
    let simplices: Vec<_> = classify_all(3, Mode::Canonical, &opts)
        .unwrap()
        .iter()
        .map(|r| r.matrix.simplex().unwrap())
        .collect();
    let mut g = c.benchmark_group("fine_dim3_canonical");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| exec.map(simplices.clone(), |p| fine_interior_of_columns(&p).unwrap().dim()))
        });
    }
    g.finish();
}

criterion_group!(benches, weights, classify, fine);
criterion_main!(benches);
