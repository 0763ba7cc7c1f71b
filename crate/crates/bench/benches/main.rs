//! Criterion benchmarks for the core algorithms: reduction, the greedy
//! identification filter, exhaustive root counting, substitution, and the
//! quadratic/quartic censuses.

use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use eisenstein_core::{
    all_reduced, enumerate_totally_ramified, greedy_filter, ramification_data, root_count,
    substitute, BaseField, EisensteinPoly,
};

fn q2(prec: usize) -> BaseField {
    BaseField::char_zero(2, 1, prec).unwrap()
}

fn poly(base: &BaseField, coeffs: &[i128]) -> EisensteinPoly {
    EisensteinPoly::from_integer_coeffs(base, coeffs).unwrap()
}

fn bench_ramification_data(c: &mut Criterion) {
    let base = q2(12);
    let f = poly(&base, &[2, 0, 0, 0]);
    c.bench_function("ramification data of a wild quartic", |b| {
        b.iter(|| ramification_data(black_box(&f)).unwrap())
    });
}

fn bench_all_reduced(c: &mut Criterion) {
    let base = q2(12);
    let f = poly(&base, &[2, 0, 0, 0]);
    c.bench_function("reduced multiset of a wild quartic", |b| {
        b.iter(|| all_reduced(black_box(&f)).unwrap())
    });
}

fn bench_greedy_filter(c: &mut Criterion) {
    let base = q2(10);
    let f = poly(&base, &[2, 2]);
    let g = poly(&base, &[6, 2]);
    c.bench_function("greedy filter on a quadratic pair", |b| {
        b.iter(|| greedy_filter(black_box(&f), black_box(&g)).unwrap())
    });
}

fn bench_root_count(c: &mut Criterion) {
    let base = q2(10);
    let f = poly(&base, &[2, 2]);
    c.bench_function("root count of a Galois quadratic in itself", |b| {
        b.iter(|| root_count(black_box(&f), black_box(&f), 12).unwrap())
    });
}

fn bench_substitute(c: &mut Criterion) {
    let base = q2(12);
    let f = poly(&base, &[2, 0, 0, 0]);
    let theta = base.residue_field().one();
    c.bench_function("uniformizer substitution at depth 2 in a quartic", |b| {
        b.iter(|| substitute(black_box(&f), black_box(&theta), 2).unwrap())
    });
}

fn bench_enumerate(c: &mut Criterion) {
    let b2 = q2(10);
    c.bench_function("census of ramified quadratics", |b| {
        b.iter(|| enumerate_totally_ramified(black_box(&b2), 2).unwrap())
    });
    let mut group = c.benchmark_group("large");
    group.sample_size(10);
    group.bench_function("census of totally ramified quartics", |b| {
        b.iter(|| enumerate_totally_ramified(black_box(&b2), 4).unwrap())
    });
    group.finish();
}

criterion_group!(
    benches,
    bench_ramification_data,
    bench_all_reduced,
    bench_greedy_filter,
    bench_root_count,
    bench_substitute,
    bench_enumerate
);
criterion_main!(benches);
