//! Span chart for context-free grammars, used by [`super::brute_force_member`].
//!
//! Item `(rule, dot, i, j)` holds when the first `dot` right-hand-side symbols
//! of `rule` derive `w[i..j]`; `(A, i, j)` holds when `A =>* w[i..j]`. Items
//! are closed to a fixpoint directly over the original rules, with no normal
//! form. Each item remembers the split that first made it true; that split
//! only uses items set strictly earlier, so back-pointers form no cycle and a
//! leftmost derivation can be read off.

use super::search::{Derivation, DerivationStep};
use crate::grammar::PlainGrammar;
use crate::symbol::Symbol;

#[derive(Clone, Copy)]
enum Back {
    /// Empty prefix.
    Start,
    /// Extends the `dot - 1` item ending at `split` by one symbol.
    Extend { split: usize },
}

struct Chart<'a> {
    g: &'a PlainGrammar,
    w: &'a [Symbol],
    /// `prefix[rule][dot][i * (m + 1) + j]`
    prefix: Vec<Vec<Vec<Option<Back>>>>,
    /// `derives[symbol][i * (m + 1) + j]`: the completing rule.
    derives: Vec<Vec<Option<usize>>>,
    items: usize,
}

impl<'a> Chart<'a> {
    fn cell(&self, i: usize, j: usize) -> usize {
        i * (self.w.len() + 1) + j
    }

    fn symbol_spans(&self, s: Symbol, k: usize, j: usize) -> bool {
        if self.g.symbols.is_terminal(s) {
            j == k + 1 && self.w[k] == s
        } else {
            self.derives[s.index()][self.cell(k, j)].is_some()
        }
    }

    fn build(g: &'a PlainGrammar, w: &'a [Symbol]) -> Self {
        let m = w.len();
        let cells = (m + 1) * (m + 1);
        let prefix = g
            .rules
            .iter()
            .map(|r| vec![vec![None; cells]; r.rhs.len() + 1])
            .collect::<Vec<_>>();
        let mut chart = Chart {
            g,
            w,
            prefix,
            derives: vec![vec![None; cells]; g.symbols.len()],
            items: 0,
        };
        for ri in 0..g.rules.len() {
            for i in 0..=m {
                let c = chart.cell(i, i);
                chart.prefix[ri][0][c] = Some(Back::Start);
                chart.items += 1;
            }
        }
        loop {
            let mut changed = false;
            for (ri, rule) in g.rules.iter().enumerate() {
                for dot in 1..=rule.rhs.len() {
                    let sym = rule.rhs[dot - 1];
                    for i in 0..=m {
                        for j in i..=m {
                            let c = chart.cell(i, j);
                            if chart.prefix[ri][dot][c].is_some() {
                                continue;
                            }
                            let split = (i..=j).find(|&k| {
                                chart.prefix[ri][dot - 1][chart.cell(i, k)].is_some() && chart.symbol_spans(sym, k, j)
                            });
                            if let Some(split) = split {
                                chart.prefix[ri][dot][c] = Some(Back::Extend { split });
                                chart.items += 1;
                                changed = true;
                            }
                        }
                    }
                }
                let head = rule.lhs[0].index();
                let last = rule.rhs.len();
                for i in 0..=m {
                    for j in i..=m {
                        let c = chart.cell(i, j);
                        if chart.derives[head][c].is_none() && chart.prefix[ri][last][c].is_some() {
                            chart.derives[head][c] = Some(ri);
                            chart.items += 1;
                            changed = true;
                        }
                    }
                }
            }
            if !changed {
                return chart;
            }
        }
    }

    /// Child spans of the completed item `(rule, i, j)`, left to right.
    fn children(&self, rule: usize, i: usize, j: usize) -> Vec<(Symbol, usize, usize)> {
        let rhs = &self.g.rules[rule].rhs;
        let mut out = Vec::with_capacity(rhs.len());
        let mut end = j;
        for dot in (1..=rhs.len()).rev() {
            let Some(Back::Extend { split }) = self.prefix[rule][dot][self.cell(i, end)] else {
                unreachable!("completed item has a full back-pointer chain")
            };
            out.push((rhs[dot - 1], split, end));
            end = split;
        }
        out.reverse();
        out
    }

    fn leftmost(&self, root: Symbol) -> Derivation {
        let mut form = vec![root];
        let mut steps = Vec::new();
        self.expand(root, 0, self.w.len(), 0, &mut form, &mut steps);
        Derivation {
            origin: vec![root],
            steps,
        }
    }

    /// Rewrites the nonterminal at `pos` of `form` into `w[i..j]`.
    fn expand(
        &self,
        a: Symbol,
        i: usize,
        j: usize,
        pos: usize,
        form: &mut Vec<Symbol>,
        steps: &mut Vec<DerivationStep>,
    ) {
        let rule = self.derives[a.index()][self.cell(i, j)].expect("item holds");
        let rhs = &self.g.rules[rule].rhs;
        form.splice(pos..pos + 1, rhs.iter().copied());
        steps.push(DerivationStep {
            rule,
            position: pos,
            form: form.clone(),
        });
        let mut at = pos;
        for (sym, k, l) in self.children(rule, i, j) {
            if self.g.symbols.is_nonterminal(sym) {
                self.expand(sym, k, l, at, form, steps);
            }
            at += l - k;
        }
    }
}

/// A leftmost derivation `root =>* w` if one exists, and the number of chart
/// items derived. The grammar must be context-free.
pub(crate) fn chart_derive(g: &PlainGrammar, root: Symbol, w: &[Symbol]) -> (Option<Derivation>, usize) {
    let chart = Chart::build(g, w);
    let found = chart.derives[root.index()][chart.cell(0, w.len())].is_some();
    (found.then(|| chart.leftmost(root)), chart.items)
}
