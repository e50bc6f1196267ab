//! Bounded language enumeration.

use std::collections::{BTreeSet, HashSet};

use super::search::collect_terminal_forms;
use super::{ensure_valid, DerivationBudget, EngineError};
use crate::grammar::PlainGrammar;
use crate::symbol::Word;

/// The words of `L(G)` with length at most a bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundedLanguage {
    pub words: BTreeSet<Word>,
    /// False when a context-sensitive search ran out of budget; `words` is
    /// then a subset of the true bounded language.
    pub complete: bool,
}

/// Context-free grammars are enumerated exactly by a least fixpoint over
/// per-nonterminal word sets; `budget` only applies to context-sensitive ones.
pub fn enumerate_language(
    g: &PlainGrammar,
    max_len: usize,
    budget: &DerivationBudget,
) -> Result<BoundedLanguage, EngineError> {
    ensure_valid(g)?;
    if g.is_context_free() {
        return Ok(BoundedLanguage {
            words: cf_fixpoint(g, max_len),
            complete: true,
        });
    }
    let (words, complete) = collect_terminal_forms(g, &[g.start], max_len, budget);
    Ok(BoundedLanguage {
        words: words.into_iter().collect(),
        complete,
    })
}

fn cf_fixpoint(g: &PlainGrammar, max_len: usize) -> BTreeSet<Word> {
    let table = &g.symbols;
    let mut lang: Vec<HashSet<Word>> = vec![HashSet::new(); table.len()];
    loop {
        let mut changed = false;
        for rule in &g.rules {
            let mut acc: HashSet<Word> = HashSet::from([Vec::new()]);
            for &s in &rule.rhs {
                let mut next = HashSet::new();
                if table.is_terminal(s) {
                    for mut w in acc {
                        if w.len() < max_len {
                            w.push(s);
                            next.insert(w);
                        }
                    }
                } else {
                    for w in &acc {
                        for tail in &lang[s.index()] {
                            if w.len() + tail.len() <= max_len {
                                let mut joined = w.clone();
                                joined.extend_from_slice(tail);
                                next.insert(joined);
                            }
                        }
                    }
                }
                acc = next;
                if acc.is_empty() {
                    break;
                }
            }
            let head = rule.lhs[0].index();
            for w in acc {
                changed |= lang[head].insert(w);
            }
        }
        if !changed {
            break;
        }
    }
    lang.swap_remove(g.start.index()).into_iter().collect()
}
