//! Seeded random instances for tests, benchmarks and the CLI.
//!
//! Nonterminals are named `S`, `A`, `B`, .. with `S` the start symbol;
//! terminals are `a`, `b`, `c`, ...

use rand::seq::SliceRandom;
use rand::Rng;

use crate::grammar::{Mode, PlainGrammar, Ppcfg, Production, ProductionGroup};
use crate::reductions::{Literal, SatInstance};
use crate::symbol::{Symbol, SymbolTable, Word};

/// Upper limits for random grammars; every count is at least 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Shape {
    pub nonterminals: usize,
    pub terminals: usize,
    pub rhs_len: usize,
}

impl Default for Shape {
    fn default() -> Self {
        Shape {
            nonterminals: 3,
            terminals: 3,
            rhs_len: 3,
        }
    }
}

const NONTERMINALS: [&str; 8] = ["S", "A", "B", "C", "D", "E", "F", "G"];
const TERMINALS: [&str; 8] = ["a", "b", "c", "d", "e", "f", "g", "h"];

fn alphabet<R: Rng>(rng: &mut R, shape: Shape) -> (SymbolTable, Vec<Symbol>, Vec<Symbol>) {
    let mut t = SymbolTable::new();
    let nv = rng.gen_range(1..=shape.nonterminals.clamp(1, NONTERMINALS.len()));
    let nt = rng.gen_range(1..=shape.terminals.clamp(1, TERMINALS.len()));
    let vs = NONTERMINALS[..nv].iter().map(|n| t.nonterminal(n)).collect();
    let ts = TERMINALS[..nt].iter().map(|n| t.terminal(n)).collect();
    (t, vs, ts)
}

fn random_rhs<R: Rng>(rng: &mut R, vs: &[Symbol], ts: &[Symbol], max_len: usize) -> Vec<Symbol> {
    let len = rng.gen_range(0..=max_len);
    (0..len)
        .map(|_| {
            if rng.gen_bool(0.5) {
                *vs.choose(rng).expect("nonempty")
            } else {
                *ts.choose(rng).expect("nonempty")
            }
        })
        .collect()
}

/// A context-free grammar with `1..=max_rules` rules; the first rule rewrites `S`.
pub fn random_cf_grammar<R: Rng>(rng: &mut R, shape: Shape, max_rules: usize) -> PlainGrammar {
    let (t, vs, ts) = alphabet(rng, shape);
    let count = rng.gen_range(1..=max_rules.max(1));
    let rules = (0..count)
        .map(|i| {
            let head = if i == 0 {
                vs[0]
            } else {
                *vs.choose(rng).expect("nonempty")
            };
            Production::unary(head, random_rhs(rng, &vs, &ts, shape.rhs_len))
        })
        .collect();
    PlainGrammar::new(t, rules, vs[0], Mode::ContextFree)
}

/// A context-free PPCFG with `1..=max_groups` groups. Each group rewrites one
/// head; arities range over `1..=max_arity` and at least one group reaches
/// `min_top_arity` (clamped to `max_arity`).
pub fn random_ppcfg<R: Rng>(
    rng: &mut R,
    shape: Shape,
    max_groups: usize,
    max_arity: usize,
    min_top_arity: usize,
) -> Ppcfg {
    let (t, vs, ts) = alphabet(rng, shape);
    let max_arity = max_arity.max(1);
    let n = rng.gen_range(1..=max_groups.max(1));
    let tall = rng.gen_range(0..n);
    let groups = (0..n)
        .map(|i| {
            let head = if i == 0 {
                vs[0]
            } else {
                *vs.choose(rng).expect("nonempty")
            };
            let low = if i == tall {
                min_top_arity.clamp(1, max_arity)
            } else {
                1
            };
            let k = rng.gen_range(low..=max_arity);
            ProductionGroup::new(
                (0..k)
                    .map(|_| Production::unary(head, random_rhs(rng, &vs, &ts, shape.rhs_len)))
                    .collect(),
            )
        })
        .collect();
    Ppcfg::new(t, groups, vs[0], Mode::ContextFree)
}

/// A CNF formula with `1..=max_vars` variables and `1..=max_clauses` clauses
/// of one to three literals over distinct variables.
pub fn random_3sat<R: Rng>(rng: &mut R, max_vars: usize, max_clauses: usize) -> SatInstance {
    let num_vars = rng.gen_range(1..=max_vars.max(1));
    let count = rng.gen_range(1..=max_clauses.max(1));
    let vars: Vec<usize> = (1..=num_vars).collect();
    let clauses = (0..count)
        .map(|_| {
            let width = rng.gen_range(1..=3.min(num_vars));
            vars.choose_multiple(rng, width)
                .map(|&var| Literal {
                    var,
                    positive: rng.gen_bool(0.5),
                })
                .collect()
        })
        .collect();
    SatInstance::new(num_vars, clauses).expect("variables in range")
}

/// Every word over `alphabet` of length at most `max_len`, shortest first.
pub fn words_up_to(alphabet: &[Symbol], max_len: usize) -> Vec<Word> {
    let mut out = vec![Vec::new()];
    let mut layer = vec![Vec::new()];
    for _ in 0..max_len {
        layer = layer
            .iter()
            .flat_map(|w: &Word| {
                alphabet.iter().map(move |&a| {
                    let mut next = w.clone();
                    next.push(a);
                    next
                })
            })
            .collect();
        out.extend(layer.iter().cloned());
    }
    out
}
