use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use gcdseq_core::factor::{is_prime, smallest_prime_factor};
use gcdseq_core::recurrence::{evolve, State};
use gcdseq_core::shortcut::{accelerated_evolve, first_events};

fn naive_vs_shortcut(c: &mut Criterion) {
    let seed = State::seed(7i128).unwrap();
    let mut group = c.benchmark_group("evolve_to");
    for n_max in [1_000i128, 100_000, 1_000_000] {
        group.bench_with_input(BenchmarkId::new("naive", n_max), &n_max, |b, &n_max| {
            b.iter(|| evolve(&seed, n_max).unwrap().filter(|r| r.as_ref().unwrap().g != 1).count())
        });
        group.bench_with_input(BenchmarkId::new("shortcut", n_max), &n_max, |b, &n_max| {
            b.iter(|| accelerated_evolve(&seed, black_box(n_max)).unwrap().events.len())
        });
    }
    group.finish();
}

fn shortcut_events(c: &mut Criterion) {
    let seed = State::seed(7i128).unwrap();
    let mut group = c.benchmark_group("shortcut_events");
    group.sample_size(20);
    for count in [50usize, 150, 200] {
        group.bench_with_input(BenchmarkId::from_parameter(count), &count, |b, &count| {
            b.iter(|| first_events(&seed, black_box(count)).unwrap())
        });
    }
    group.finish();
}

fn factoring(c: &mut Criterion) {
    const N: u128 = 1_000_000;
    let mut group = c.benchmark_group("factor");
    group.bench_function("is_prime_below_1e6", |b| {
        b.iter(|| (1..N).step_by(101).filter(|&n| is_prime(n)).count())
    });
    group.bench_function("spf_below_1e6", |b| {
        b.iter(|| (2..N).step_by(501).map(|n| smallest_prime_factor(n).unwrap()).sum::<u128>())
    });
    // products of two primes just above 2^31 and 2^40
    let semiprimes = [2_147_483_659u128 * 2_147_483_693, 1_099_511_627_791 * 1_099_511_627_803];
    for (bits, m) in [62, 80].into_iter().zip(semiprimes) {
        group.bench_with_input(BenchmarkId::new("spf_semiprime", bits), &m, |b, &m| {
            b.iter(|| smallest_prime_factor(black_box(m)).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, naive_vs_shortcut, shortcut_events, factoring);
criterion_main!(benches);
