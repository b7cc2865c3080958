use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use rearrange_lab_bench::*;
use rearrange_lab_core::functionals::{ball_difference_i, eval_hl, eval_riesz2};
use rearrange_lab_core::supermod::check_supermodular;
use rearrange_lab_core::RieszOptions;

fn rearrangement(c: &mut Criterion) {
    let u = staircase(64);
    c.bench_function("rearrange_1d_64_pieces", |b| {
        b.iter(|| black_box(&u).rearrange())
    });
    let t = target(32);
    c.bench_function("rearrange_2d_32_rings", |b| {
        b.iter(|| black_box(&t).rearrange())
    });
}

fn functionals(c: &mut Criterion) {
    let f = product_integrand();
    let u = vec![staircase(32), staircase(32).rearrange()];
    c.bench_function("eval_hl_1d_32_pieces", |b| {
        b.iter(|| eval_hl(black_box(&f), black_box(&u)).unwrap())
    });

    let g = staircase(8);
    let opts = RieszOptions::default();
    let indicator = indicator_kernel();
    c.bench_function("eval_riesz2_1d_indicator", |b| {
        b.iter(|| eval_riesz2(&f, black_box(&g), &g, &indicator, &opts).unwrap())
    });
    let smooth = smooth_kernel();
    c.bench_function("eval_riesz2_1d_quadrature", |b| {
        b.iter(|| eval_riesz2(&f, black_box(&g), &g, &smooth, &opts).unwrap())
    });

    let disk = target(2);
    let mc = RieszOptions {
        samples: 20_000,
        seed: 1,
    };
    let mut group = c.benchmark_group("monte_carlo");
    group.sample_size(10);
    group.bench_function("eval_riesz2_2d_20k", |b| {
        b.iter(|| eval_riesz2(&f, black_box(&disk), &disk, &smooth, &mc).unwrap())
    });
    group.bench_function("ball_difference_i_2d", |b| {
        b.iter(|| ball_difference_i(&indicator, 0.25, &[1.5, 0.0], black_box(2.0), 2).unwrap())
    });
    group.finish();
}

fn lattice(c: &mut Criterion) {
    let f = polynomial_integrand();
    let lattice = default_lattice();
    c.bench_function("check_supermodular_default_lattice", |b| {
        b.iter(|| check_supermodular(black_box(&f), &lattice).unwrap())
    });
}

criterion_group!(benches, rearrangement, functionals, lattice);
criterion_main!(benches);
