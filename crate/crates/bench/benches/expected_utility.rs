use std::hint::black_box;

use approval_core::money::rational;
use approval_core::{
    best_response, builtin, expected_utility_bruteforce, expected_utility_exact, expected_utility_mc,
    increment_distribution, truthful_ballot, CompletionModel,
};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn exact(c: &mut Criterion) {
    let s3 = builtin("3").unwrap();
    let ballot = truthful_ballot(&s3.utilities);
    let mut group = c.benchmark_group("exact");
    for n in [0u32, 1, 3, 6] {
        let profile = s3.with_missing(n);
        group.bench_with_input(BenchmarkId::new("uniform", n), &profile, |b, p| {
            b.iter(|| expected_utility_exact(black_box(p), ballot, 2, &CompletionModel::UniformSubsets).unwrap())
        });
    }
    let independent = CompletionModel::IndependentApproval(rational(1, 4));
    group.bench_function("independent/3", |b| {
        b.iter(|| expected_utility_exact(&s3.with_missing(3), ballot, 2, black_box(&independent)).unwrap())
    });
    group.finish();
}

fn increments(c: &mut Criterion) {
    let mut group = c.benchmark_group("increments");
    for n in [1u32, 3, 6] {
        group.bench_with_input(BenchmarkId::new("uniform", n), &n, |b, &n| {
            b.iter(|| increment_distribution(&CompletionModel::UniformSubsets, 5, black_box(n)).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("single-vote", n), &n, |b, &n| {
            b.iter(|| {
                increment_distribution(&CompletionModel::SingleVote { allow_abstain: true }, 5, black_box(n)).unwrap()
            })
        });
    }
    group.finish();
}

fn brute_force(c: &mut Criterion) {
    let s3 = builtin("3").unwrap();
    let ballot = truthful_ballot(&s3.utilities);
    let mut group = c.benchmark_group("bruteforce");
    group.sample_size(10);
    for n in [1u32, 2, 3] {
        let profile = s3.with_missing(n);
        group.bench_with_input(BenchmarkId::new("uniform", n), &profile, |b, p| {
            b.iter(|| expected_utility_bruteforce(black_box(p), ballot, 2, &CompletionModel::UniformSubsets).unwrap())
        });
    }
    group.finish();
}

fn best(c: &mut Criterion) {
    let s4 = builtin("4").unwrap();
    let mut group = c.benchmark_group("best_response");
    group.sample_size(20);
    for n in [0u32, 1, 3] {
        let profile = s4.with_missing(n);
        group.bench_with_input(BenchmarkId::new("uniform_k3", n), &profile, |b, p| {
            b.iter(|| best_response(black_box(p), 3, &CompletionModel::UniformSubsets).unwrap())
        });
    }
    group.finish();
}

fn monte_carlo(c: &mut Criterion) {
    let s3 = builtin("3").unwrap().with_missing(1);
    let ballot = truthful_ballot(&s3.utilities);
    c.bench_function("mc/10k", |b| {
        b.iter(|| expected_utility_mc(&s3, ballot, 1, &CompletionModel::UniformSubsets, 10_000, black_box(7)).unwrap())
    });
}

criterion_group!(benches, exact, increments, brute_force, best, monte_carlo);
criterion_main!(benches);
