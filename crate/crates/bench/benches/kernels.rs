use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use sticky_bench::{convex_function, headon_input, headon_system, rough_function, EPS};
use sticky_core::{eps_convex_hull, legendre, propagate};

fn hull(c: &mut Criterion) {
    let mut g = c.benchmark_group("eps_convex_hull");
    for n in [1024, 16384] {
        let f = rough_function(n);
        g.bench_with_input(BenchmarkId::from_parameter(n), &f, |b, f| {
            b.iter(|| eps_convex_hull(black_box(f), EPS).unwrap())
        });
    }
    g.finish();
}

fn legendre_transform(c: &mut Criterion) {
    let mut g = c.benchmark_group("legendre");
    for n in [1024, 16384] {
        let f = convex_function(n);
        g.bench_with_input(BenchmarkId::from_parameter(n), &f, |b, f| {
            b.iter(|| legendre(black_box(f), -3.0, 3.0, n).unwrap())
        });
    }
    g.finish();
}

fn simulator(c: &mut Criterion) {
    let mut g = c.benchmark_group("advance_to");
    for n in [256, 2048] {
        let sys = headon_system(n);
        g.bench_with_input(BenchmarkId::from_parameter(n), &sys, |b, sys| {
            b.iter(|| {
                let mut s = sys.clone();
                s.advance_to(black_box(2.0)).unwrap();
                s
            })
        });
    }
    g.finish();
}

fn propagator(c: &mut Criterion) {
    let mut g = c.benchmark_group("propagate");
    for n in [1024, 16384] {
        let input = headon_input(n);
        g.bench_with_input(BenchmarkId::from_parameter(n), &input, |b, input| {
            b.iter(|| propagate(black_box(input), 2.0).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, hull, legendre_transform, simulator, propagator);
criterion_main!(benches);
