use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use vcalc_bench::{expr, settings};
use vcalc_core::{ftc_check, integrate, make_partition, riemann_sum, TagScheme};

fn sums(c: &mut Criterion) {
    let f = expr("exp(x)*sin(x)");
    let p = make_partition(0.0, 1.0, 1024, TagScheme::Midpoint).unwrap();
    c.bench_function("integrate/riemann_1024", |b| b.iter(|| riemann_sum(&f, black_box(&p)).unwrap()));
}

fn reports(c: &mut Criterion) {
    let s = settings();
    let sq = expr("x^2");
    c.bench_function("integrate/x2_unit", |b| b.iter(|| integrate(&sq, 0.0, black_box(1.0), &s).unwrap()));
    let exp = expr("exp(x)");
    let mut group = c.benchmark_group("integrate/ftc");
    group.sample_size(10);
    group.bench_function("exp", |b| b.iter(|| ftc_check(&exp, 0.0, black_box(0.5), &s).unwrap()));
    group.finish();
}

criterion_group!(benches, sums, reports);
criterion_main!(benches);
