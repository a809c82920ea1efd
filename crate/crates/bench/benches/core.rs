use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use middleconv::rational::q;
use middleconv::{
    classify, connection_formula, construct_rigid, enumerate_basic_with, enumerate_rigid_with,
    middle_convolution, orbit_dims, reduce, series_limit_oracle, EnumerateOptions, RiemannScheme,
    SpectralType,
};
use middleconv::katz::random_generic_scheme;
use middleconv_bench::{mixed_tuples, rigid_up_to};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn sequential() -> EnumerateOptions {
    EnumerateOptions {
        threads: Some(1),
        ..EnumerateOptions::default()
    }
}

fn enumeration(c: &mut Criterion) {
    let mut g = c.benchmark_group("enumerate");
    g.sample_size(10);
    for n in [6, 8, 10] {
        g.bench_with_input(BenchmarkId::new("rigid", n), &n, |b, &n| {
            b.iter(|| enumerate_rigid_with(n, &sequential()).unwrap())
        });
    }
    for p in [-2, -4] {
        g.bench_with_input(BenchmarkId::new("basic", p), &p, |b, &p| {
            b.iter(|| enumerate_basic_with(p, &sequential()).unwrap())
        });
    }
    g.finish();
}

fn reduction(c: &mut Criterion) {
    let tuples = mixed_tuples();
    c.bench_function("reduce/mixed", |b| {
        b.iter(|| tuples.iter().map(|m| reduce(black_box(m)).steps.len()).sum::<usize>())
    });
    let rigid = rigid_up_to(8);
    c.bench_function("classify/rigid<=8", |b| {
        b.iter(|| rigid.iter().filter(|m| classify(black_box(m)).rigid).count())
    });
}

fn matrices(c: &mut Criterion) {
    let mut g = c.benchmark_group("matrix");
    g.sample_size(10);
    for shape in ["111,111,21", "211,211,211", "22,211,1111"] {
        let m = SpectralType::parse_untrimmed(shape).unwrap();
        let s = random_generic_scheme(&m, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        g.bench_with_input(BenchmarkId::new("construct_rigid", shape), &s, |b, s| {
            b.iter(|| construct_rigid(s).unwrap())
        });
        let t = construct_rigid(&s).unwrap();
        let vals = s.constant_eigenvalues().unwrap();
        let mu: Vec<_> = vals.iter().map(|r| r[0].clone()).collect();
        g.bench_with_input(BenchmarkId::new("middle_convolution", shape), &t, |b, t| {
            b.iter(|| middle_convolution(t, &mu).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("orbit_dims", shape), &t, |b, t| {
            b.iter(|| orbit_dims(t).unwrap())
        });
    }
    g.finish();
}

fn connection(c: &mut Criterion) {
    let s = RiemannScheme::symbolic(&SpectralType::parse_untrimmed("1111,31,1111").unwrap()).unwrap();
    c.bench_function("connection_formula/1111,31,1111", |b| {
        b.iter(|| connection_formula(black_box(&s)).unwrap())
    });
    let alphas = [q(1, 3), q(5, 7)];
    let betas = [q(3, 4), q(1, 3) + q(5, 7) - q(3, 4)];
    c.bench_function("series_limit_oracle/gauss", |b| {
        b.iter(|| series_limit_oracle(&alphas, &betas, 1e-6).unwrap())
    });
}

criterion_group!(benches, enumeration, reduction, matrices, connection);
criterion_main!(benches);
