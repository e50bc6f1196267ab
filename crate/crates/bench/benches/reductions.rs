use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use ppgram_bench::sat_cases;
use ppgram_core::reductions::{dpll_solve, factor_via_ppcsg, factoring_to_ppcsg, sat_solve_via_grammar};
use std::hint::black_box;

fn sat(c: &mut Criterion) {
    let cases = sat_cases(20, 10, 15);
    let mut group = c.benchmark_group("sat");
    group.bench_function("grammar", |b| {
        b.iter(|| {
            for i in &cases {
                black_box(sat_solve_via_grammar(i, 1 << 10).expect("small"));
            }
        })
    });
    group.bench_function("dpll", |b| {
        b.iter(|| {
            for i in &cases {
                black_box(dpll_solve(i));
            }
        })
    });
    group.finish();
}

fn factoring(c: &mut Criterion) {
    let mut group = c.benchmark_group("factoring-derivation");
    group.sample_size(10);
    for n in [12u64, 18, 24] {
        let r = factoring_to_ppcsg(n).expect("n >= 1");
        let budget = r.default_budget();
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| {
                for p in 1..=r.max_p() {
                    black_box(r.derivation_check(p, &budget).expect("in range"));
                }
            })
        });
    }
    group.finish();
    c.bench_function("factor-composites-to-1000", |b| {
        b.iter(|| {
            for n in 4..=1000u64 {
                black_box(factor_via_ppcsg(n).expect("n >= 1"));
            }
        })
    });
}

criterion_group!(benches, sat, factoring);
criterion_main!(benches);
