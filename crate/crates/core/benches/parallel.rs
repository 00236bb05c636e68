//! Rayon vs sequential comparison for the exhaustive inner loops.
//!
//! Built with the default `parallel` feature, `enumerate_codes`,
//! `lemma_gap_check`, and `minimal_context` fan out over rayon while their
//! `_seq` twins stay single-threaded, so each group pits the two against
//! each other on the same inputs.

use criterion::{criterion_group, criterion_main, Criterion};

use rank1_core::centralizer::{enumerate_codes, enumerate_codes_seq, language};
use rank1_core::recognizer::{
    lemma_gap_check, lemma_gap_check_seq, minimal_context, minimal_context_seq,
};
use rank1_core::{preset, Budget};

fn bench_enumeration(c: &mut Criterion) {
    let budget = Budget::default();
    let schedule = preset("chacon").unwrap();
    let lang = language(&schedule, 24, false, &budget).unwrap();

    let mut group = c.benchmark_group("enumerate_codes/chacon_r2_l24");
    group.sample_size(20);
    group.bench_function("seq", |b| {
        b.iter(|| enumerate_codes_seq(&lang, 2, 24, &budget).unwrap())
    });
    group.bench_function("auto", |b| {
        b.iter(|| enumerate_codes(&lang, 2, 24, &budget).unwrap())
    });
    group.finish();

    let lang3 = language(&schedule, 30, false, &budget).unwrap();
    let mut group = c.benchmark_group("enumerate_codes/chacon_r3_l30");
    group.sample_size(10);
    group.bench_function("seq", |b| {
        b.iter(|| enumerate_codes_seq(&lang3, 3, 30, &budget).unwrap())
    });
    group.bench_function("auto", |b| {
        b.iter(|| enumerate_codes(&lang3, 3, 30, &budget).unwrap())
    });
    group.finish();
}

fn bench_lemma(c: &mut Criterion) {
    let budget = Budget::default();
    let schedule = preset("paper-4copy").unwrap();

    let mut group = c.benchmark_group("lemma_gap_check/4copy_m6_n1");
    group.sample_size(10);
    group.bench_function("seq", |b| {
        b.iter(|| lemma_gap_check_seq(&schedule, 6, 1, &budget).unwrap())
    });
    group.bench_function("auto", |b| {
        b.iter(|| lemma_gap_check(&schedule, 6, 1, &budget).unwrap())
    });
    group.finish();
}

fn bench_minimal_context(c: &mut Criterion) {
    let budget = Budget::default();
    let schedule = preset("paper-4copy").unwrap();

    let mut group = c.benchmark_group("minimal_context/4copy_n1_m4");
    group.sample_size(10);
    group.bench_function("seq", |b| {
        b.iter(|| minimal_context_seq(&schedule, 1, 4, &budget).unwrap())
    });
    group.bench_function("auto", |b| {
        b.iter(|| minimal_context(&schedule, 1, 4, &budget).unwrap())
    });
    group.finish();
}

criterion_group!(benches, bench_enumeration, bench_lemma, bench_minimal_context);
criterion_main!(benches);
