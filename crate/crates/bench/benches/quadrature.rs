use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use jacobi_spectra::measures::nevai_ullman_density;
use jacobi_spectra::traceformula::limit_functional;
use jacobi_spectra_bench::fixture;

fn bench_limit_functional(c: &mut Criterion) {
    let mut group = c.benchmark_group("limit_functional");
    group.sample_size(20);
    let vanvleck = fixture("vanvleck");
    group.bench_function("vanvleck/m2", |b| {
        b.iter(|| limit_functional(black_box(&vanvleck.mu), |x| x * x).unwrap())
    });
    let toeplitz = fixture("toeplitz");
    group.bench_function("atoms/abs", |b| {
        b.iter(|| limit_functional(black_box(&toeplitz.mu), |x| x.abs()).unwrap())
    });
    group.finish();
}

fn bench_mellin_density(c: &mut Criterion) {
    let mut group = c.benchmark_group("nevai_ullman");
    group.sample_size(10);
    let density = nevai_ullman_density(0.5, 0.0, 0.5, 64).unwrap();
    group.bench_function("pointwise", |b| {
        b.iter(|| black_box(&density).density(black_box(0.37)))
    });
    group.bench_function("fourth_moment", |b| {
        b.iter(|| black_box(&density).integrate(|x| x.powi(4)))
    });
    group.finish();
}

criterion_group!(benches, bench_limit_functional, bench_mellin_density);
criterion_main!(benches);
