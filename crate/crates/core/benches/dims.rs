//! Hot paths that go through `par::map`. Bench ids do not depend on the
//! feature set, so the two paths compare through criterion baselines:
//!
//! ```text
//! cargo bench -p monalg --no-default-features -- --save-baseline sequential
//! cargo bench -p monalg -- --baseline sequential
//! ```

use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use monalg::growth::GrowthSpec;
use monalg::locnil::{build_tilde, lambda_stats};
use monalg::prime::check_prime;
use monalg::primitive::EpsSeq;
use monalg::words::factors::DimEngine;
use monalg::words::{build, Limits, StrategySpec};

fn benches(c: &mut Criterion) {
    eprintln!("parallel path compiled in: {}", monalg::par::PARALLEL);
    let g: GrowthSpec = "exproot:d=2,beta=1/2".parse().unwrap();
    let lim = Limits::default();
    let prime = build(&g, 7, &StrategySpec::Prime, &lim).unwrap();
    let lengths: Vec<usize> = (1..=128).collect();
    c.bench_function("dims_1_to_128", |b| {
        b.iter(|| DimEngine::new(black_box(&prime)).dims(&lengths).unwrap())
    });
    c.bench_function("check_prime_len2", |b| b.iter(|| check_prime(black_box(&prime), 2).unwrap()));
    let sys = build_tilde(&g, 10, &EpsSeq::pow2(0), &lim).unwrap();
    c.bench_function("lambda_stats_depth10", |b| {
        b.iter(|| lambda_stats(black_box(&sys.state), sys.letter()).unwrap())
    });
}

criterion_group! {
    name = dims;
    config = Criterion::default().sample_size(10);
    targets = benches
}
criterion_main!(dims);
