use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use sphere_restriction::restriction::radial_constant;
use sphere_restriction::weighted::{weighted_norm, weighted_sup, NormQuery};
use sphere_restriction_bench::norm_queries;

fn norms(c: &mut Criterion) {
    let mut g = c.benchmark_group("weighted_norm");
    g.sample_size(20);
    for (nu, p, alpha) in norm_queries() {
        let q = NormQuery::new(nu, p, alpha, 1e-8).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(format!("nu={nu},p={p}")), &q, |b, q| {
            b.iter(|| black_box(weighted_norm(q).unwrap()))
        });
    }
    g.finish();
}

fn sup(c: &mut Criterion) {
    c.bench_function("weighted_sup/nu=64", |b| {
        b.iter(|| black_box(weighted_sup(64.0, 0.0).unwrap()))
    });
}

fn radial(c: &mut Criterion) {
    let mut g = c.benchmark_group("radial_constant");
    g.sample_size(20);
    for d in [4u32, 32, 200] {
        let df = d as f64;
        let ps = 2.0 * (df + 1.0) / (df + 3.0);
        g.bench_with_input(BenchmarkId::from_parameter(d), &d, |b, &d| {
            b.iter(|| black_box(radial_constant(d, ps, 2.0, 1e-8).unwrap()))
        });
    }
    g.finish();
}

criterion_group!(benches, norms, sup, radial);
criterion_main!(benches);
