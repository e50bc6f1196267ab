//! Reductions checked against arithmetic and a plain solver.

use ppgram_core::engines::Verdict;
use ppgram_core::reductions::{
    divisor_membership, dpll_solve, factor_via_ppcsg, factoring_to_ppcsg, factoring_to_ppcsg_with, parse_dimacs,
    sat_solve_via_grammar, sat_to_ppcfg, CollapseGadget, FactorOutcome, SatError,
};
use ppgram_core::text::{parse_grammar, write_grammar};
use ppgram_core::DerivationBudget;

#[test]
fn filtered_search_matches_plain_search_where_both_finish() {
    // the plain search (potential only) is the reference for the alignment filter
    for n in 4..=14u64 {
        let r = factoring_to_ppcsg(n).unwrap();
        let budget = r.default_budget();
        for p in 1..=r.max_p() {
            let fast = r.derivation_check(p, &budget).unwrap();
            let plain = r.derivation_check_generic(p, &budget).unwrap();
            assert_ne!(fast.verdict, Verdict::Unknown, "n={n} p={p}");
            assert_ne!(plain.verdict, Verdict::Unknown, "n={n} p={p}");
            assert_eq!(fast.verdict, plain.verdict, "n={n} p={p}");
            assert_eq!(fast.verdict == Verdict::Yes, divisor_membership(n, p).unwrap());
        }
    }
}

#[test]
fn yes_witnesses_replay_to_the_target() {
    for (n, p) in [(6u64, 2u64), (12, 3), (15, 3), (16, 4)] {
        let r = factoring_to_ppcsg(n).unwrap();
        let plain = r.grammar.instantiate(&r.number_to_setting(p).unwrap()).unwrap();
        let ans = r.derivation_check(p, &r.default_budget()).unwrap();
        let d = ans.witness.expect("p divides n");
        assert!(d.replay(&plain.rules));
        assert_eq!(d.result(), &r.target_word[..]);
        assert_eq!(d.origin, vec![plain.start]);
    }
}

#[test]
fn lossy_gadget_admits_a_non_divisor() {
    let r = factoring_to_ppcsg_with(5, CollapseGadget::Lossy).unwrap();
    let ans = r
        .derivation_check(2, &DerivationBudget::new(9, 200_000).unwrap())
        .unwrap();
    assert_eq!(ans.verdict, Verdict::Yes);
    assert!(!divisor_membership(5, 2).unwrap());
}

#[test]
fn factor_pairs_multiply_back() {
    for n in 1..=2000u64 {
        match factor_via_ppcsg(n).unwrap() {
            FactorOutcome::Factors { p, q } => {
                assert!(p >= 2 && q >= 2 && p * q == n, "n={n}");
                assert!((2..p).all(|d| n % d != 0), "smallest factor first");
            }
            FactorOutcome::PrimeOrUnit => assert!(n < 4 || (2..n).all(|d| n % d != 0), "n={n}"),
        }
    }
}

#[test]
fn factoring_grammar_text_round_trips() {
    for n in [1u64, 15, 100, 9999] {
        let g = factoring_to_ppcsg(n).unwrap().grammar;
        assert_eq!(parse_grammar(&write_grammar(&g)).unwrap(), g);
    }
}

#[test]
fn dimacs_solves_through_the_grammar() {
    let text = "c example\np cnf 3 4\n1 -2 0\n2 3\n0\n-1 -3 0\n-3 0\n";
    let inst = parse_dimacs(text, true).unwrap();
    let (a, p) = sat_solve_via_grammar(&inst, 1 << 10).unwrap().unwrap();
    assert!(inst.is_satisfied_by(&a));
    assert!(sat_to_ppcfg(&inst).covers_all_clauses(&p).unwrap());
    assert!(dpll_solve(&inst).is_some());

    let unsat = parse_dimacs("p cnf 2 4\n1 2 0\n1 -2 0\n-1 2 0\n-1 -2 0\n", true).unwrap();
    assert_eq!(sat_solve_via_grammar(&unsat, 1 << 10).unwrap(), None);
    assert_eq!(dpll_solve(&unsat), None);

    let wide = "p cnf 4 1\n1 2 3 4 0\n";
    assert!(matches!(
        parse_dimacs(wide, true),
        Err(SatError::Dimacs { line: 2, .. })
    ));
    assert_eq!(parse_dimacs(wide, false).unwrap().clauses[0].len(), 4);
}

#[test]
fn sat_grammar_text_round_trips() {
    let inst = parse_dimacs("p cnf 3 2\n1 -2 3 0\n-1 2 0\n", true).unwrap();
    let g = sat_to_ppcfg(&inst).grammar;
    assert!(g.validate().is_ok());
    assert_eq!(parse_grammar(&write_grammar(&g)).unwrap(), g);
}
