use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use ppgram_bench::cf_cases;
use ppgram_core::engines::{brute_force_member, cyk_member, derive, to_cnf};
use ppgram_core::DerivationBudget;
use std::hint::black_box;

fn membership(c: &mut Criterion) {
    let mut group = c.benchmark_group("cf-membership");
    for len in [4usize, 8, 16] {
        let cases = cf_cases(20, len);
        let cnfs: Vec<_> = cases.iter().map(|(g, _)| to_cnf(g).expect("valid")).collect();
        let budget = DerivationBudget::for_word_len(len);
        group.bench_with_input(BenchmarkId::new("cyk", len), &len, |b, _| {
            b.iter(|| {
                for (cnf, (_, w)) in cnfs.iter().zip(&cases) {
                    black_box(cyk_member(cnf, w).expect("alphabet"));
                }
            })
        });
        group.bench_with_input(BenchmarkId::new("chart", len), &len, |b, _| {
            b.iter(|| {
                for (g, w) in &cases {
                    black_box(brute_force_member(g, w, &budget).expect("alphabet"));
                }
            })
        });
    }
    group.finish();
}

fn bfs_derive(c: &mut Criterion) {
    let mut group = c.benchmark_group("bfs-derive");
    group.sample_size(10);
    for len in [3usize, 5] {
        let cases = cf_cases(10, len);
        let budget = DerivationBudget::new(2 * len + 4, 20_000).expect("positive");
        group.bench_with_input(BenchmarkId::from_parameter(len), &len, |b, _| {
            b.iter(|| {
                for (g, w) in &cases {
                    black_box(derive(g, &[g.start], w, &budget, None).expect("alphabet"));
                }
            })
        });
    }
    group.finish();
}

criterion_group!(benches, membership, bfs_derive);
criterion_main!(benches);
