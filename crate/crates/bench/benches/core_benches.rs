use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use hermite_lab::{
    expand, partial_sum_path, rank_report, sample_fgn, scan_shift, variance_of_hermite_sums,
    AxisSpec, BaseFunction, FgnModel, FgnSampler, FunctionSpec, QuadratureRule, ScanGrid,
    ScanOptions, DEFAULT_RANK_TOL, DEFAULT_TRUNCATION,
};

fn bench_quadrature(c: &mut Criterion) {
    let mut group = c.benchmark_group("gauss_hermite_rule");
    for nodes in [64usize, 200, 2000] {
        group.bench_with_input(BenchmarkId::from_parameter(nodes), &nodes, |b, &n| {
            b.iter(|| QuadratureRule::gauss_hermite(black_box(n)).unwrap());
        });
    }
    group.finish();
}

fn bench_expansion(c: &mut Criterion) {
    let rule = QuadratureRule::gauss_hermite(200).unwrap();
    let abs = FunctionSpec::from_base(BaseFunction::Abs).unwrap();
    let square = FunctionSpec::polynomial(&[0.0, 0.0, 1.0]).unwrap();
    c.bench_function("expand_abs_order30_200nodes", |b| {
        b.iter(|| expand(black_box(&abs), DEFAULT_TRUNCATION, &rule).unwrap());
    });
    c.bench_function("rank_report_square", |b| {
        b.iter(|| rank_report(black_box(&square), DEFAULT_RANK_TOL, DEFAULT_TRUNCATION, &rule).unwrap());
    });
}

fn bench_fgn(c: &mut Criterion) {
    let mut group = c.benchmark_group("fgn_sample");
    for exponent in [10usize, 14] {
        let n = 1usize << exponent;
        let sampler = FgnSampler::new(FgnModel::new(0.8, n).unwrap()).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &sampler, |b, s| {
            let mut seed = 0u64;
            b.iter(|| {
                seed += 1;
                black_box(s.sample(seed))
            });
        });
    }
    group.finish();

    c.bench_function("fgn_sampler_setup_2pow14", |b| {
        b.iter(|| FgnSampler::new(FgnModel::new(black_box(0.8), 1 << 14).unwrap()).unwrap());
    });
    c.bench_function("variance_of_hermite_sums_2pow16", |b| {
        b.iter(|| variance_of_hermite_sums(black_box(0.8), 2, 1 << 16).unwrap());
    });
}

fn bench_partial_sums(c: &mut Criterion) {
    let rule = QuadratureRule::gauss_hermite(200).unwrap();
    let spec = FunctionSpec::polynomial(&[-1.0, 0.0, 1.0]).unwrap();
    let path = sample_fgn(FgnModel::new(0.8, 1 << 14).unwrap(), 1).unwrap();
    c.bench_function("partial_sum_2pow14", |b| {
        b.iter(|| partial_sum_path(black_box(&path), &spec, 0.1, true, &[1.0], &rule).unwrap());
    });
}

fn bench_scan(c: &mut Criterion) {
    let rule = QuadratureRule::gauss_hermite(200).unwrap();
    let spec = FunctionSpec::polynomial(&[-1.0, 0.0, 1.0]).unwrap();
    let grid = ScanGrid::one_dim(AxisSpec::new(-1.0, 1.0, 101).unwrap());
    let opts = ScanOptions::default();
    c.bench_function("scan_shift_101pts", |b| {
        b.iter(|| scan_shift(black_box(&spec), &grid, &opts, &rule).unwrap());
    });
}

criterion_group!(
    benches,
    bench_quadrature,
    bench_expansion,
    bench_fgn,
    bench_partial_sums,
    bench_scan
);
criterion_main!(benches);
