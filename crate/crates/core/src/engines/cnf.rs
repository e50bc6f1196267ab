//! Chomsky normal form conversion and CYK recognition.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use super::EngineError;
use crate::grammar::PlainGrammar;
use crate::symbol::{Symbol, SymbolTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
enum Item {
    T(Symbol),
    N(usize),
}

/// A grammar with only `A -> B C` and `A -> a` rules, plus a flag recording
/// whether the start symbol derives the empty word.
#[derive(Debug, Clone)]
pub struct CnfGrammar {
    symbols: Arc<SymbolTable>,
    nonterminal_count: usize,
    start: usize,
    binary: Vec<(usize, usize, usize)>,
    terminal: Vec<(usize, Symbol)>,
    nullable_start: bool,
}

impl CnfGrammar {
    pub fn binary_rules(&self) -> &[(usize, usize, usize)] {
        &self.binary
    }

    pub fn terminal_rules(&self) -> &[(usize, Symbol)] {
        &self.terminal
    }

    pub fn nullable_start(&self) -> bool {
        self.nullable_start
    }

    pub fn nonterminal_count(&self) -> usize {
        self.nonterminal_count
    }

    pub fn symbols(&self) -> &SymbolTable {
        &self.symbols
    }
}

/// Converts a context-free grammar: fresh start, ε-elimination, unit-rule
/// elimination, terminal lifting and right-branching binarization.
pub fn to_cnf(g: &PlainGrammar) -> Result<CnfGrammar, EngineError> {
    super::ensure_valid(g)?;
    if !g.is_context_free() {
        return Err(EngineError::NotContextFree);
    }
    let mut index: HashMap<Symbol, usize> = HashMap::new();
    for nt in g.symbols.nonterminals() {
        let next = index.len();
        index.insert(nt, next);
    }
    let Some(&old_start) = index.get(&g.start) else {
        return Err(EngineError::UnknownNonterminal(g.symbols.name(g.start).to_owned()));
    };
    let mut count = index.len();
    let start = count;
    count += 1;

    let item = |s: Symbol| {
        if g.symbols.is_terminal(s) {
            Item::T(s)
        } else {
            Item::N(index[&s])
        }
    };
    let mut rules: Vec<(usize, Vec<Item>)> = vec![(start, vec![Item::N(old_start)])];
    rules.extend(
        g.rules
            .iter()
            .map(|r| (index[&r.lhs[0]], r.rhs.iter().map(|&s| item(s)).collect())),
    );

    // nullable nonterminals
    let mut nullable = vec![false; count];
    loop {
        let mut changed = false;
        for (lhs, rhs) in &rules {
            if !nullable[*lhs] && rhs.iter().all(|it| matches!(it, Item::N(b) if nullable[*b])) {
                nullable[*lhs] = true;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let nullable_start = nullable[start];

    // ε-elimination: every way of dropping nullable occurrences, keeping nonempty results
    let mut no_eps: BTreeSet<(usize, Vec<Item>)> = BTreeSet::new();
    for (lhs, rhs) in &rules {
        let mut variants: Vec<Vec<Item>> = vec![Vec::new()];
        for it in rhs {
            let droppable = matches!(it, Item::N(b) if nullable[*b]);
            let mut next = Vec::with_capacity(variants.len() * 2);
            for v in variants {
                if droppable {
                    next.push(v.clone());
                }
                let mut kept = v;
                kept.push(*it);
                next.push(kept);
            }
            variants = next;
        }
        for v in variants.into_iter().filter(|v| !v.is_empty()) {
            no_eps.insert((*lhs, v));
        }
    }

    // unit closure: unit[a] holds every b with a =>* b through unit rules
    let mut unit: Vec<BTreeSet<usize>> = (0..count).map(|a| BTreeSet::from([a])).collect();
    loop {
        let mut changed = false;
        for (lhs, rhs) in &no_eps {
            if let [Item::N(b)] = rhs[..] {
                let reach: Vec<usize> = unit[b].iter().copied().collect();
                for r in reach {
                    changed |= unit[*lhs].insert(r);
                }
            }
        }
        if !changed {
            break;
        }
    }
    let mut by_lhs: Vec<Vec<&Vec<Item>>> = vec![Vec::new(); count];
    for (lhs, rhs) in &no_eps {
        if !matches!(rhs[..], [Item::N(_)]) {
            by_lhs[*lhs].push(rhs);
        }
    }
    let mut flat: BTreeSet<(usize, Vec<Item>)> = BTreeSet::new();
    for a in 0..count {
        for &b in &unit[a] {
            for rhs in &by_lhs[b] {
                flat.insert((a, (*rhs).clone()));
            }
        }
    }

    let mut binary = BTreeSet::new();
    let mut terminal = BTreeSet::new();
    let mut lifted: HashMap<Symbol, usize> = HashMap::new();
    for (lhs, rhs) in flat {
        if let [Item::T(a)] = rhs[..] {
            terminal.insert((lhs, a));
            continue;
        }
        let mut nts: Vec<usize> = Vec::with_capacity(rhs.len());
        for it in rhs {
            nts.push(match it {
                Item::N(b) => b,
                Item::T(a) => *lifted.entry(a).or_insert_with(|| {
                    let fresh = count;
                    count += 1;
                    terminal.insert((fresh, a));
                    fresh
                }),
            });
        }
        let mut head = lhs;
        while nts.len() > 2 {
            let first = nts.remove(0);
            let tail = count;
            count += 1;
            binary.insert((head, first, tail));
            head = tail;
        }
        binary.insert((head, nts[0], nts[1]));
    }

    Ok(CnfGrammar {
        symbols: Arc::clone(&g.symbols),
        nonterminal_count: count,
        start,
        binary: binary.into_iter().collect(),
        terminal: terminal.into_iter().collect(),
        nullable_start,
    })
}

/// CYK membership for a CNF grammar.
pub fn cyk_member(g: &CnfGrammar, w: &[Symbol]) -> Result<bool, EngineError> {
    for &s in w {
        if !g.symbols.contains(s) || !g.symbols.is_terminal(s) {
            let name = if g.symbols.contains(s) {
                g.symbols.name(s).to_owned()
            } else {
                format!("#{}", s.index())
            };
            return Err(EngineError::UnknownTerminal(name));
        }
    }
    let n = w.len();
    if n == 0 {
        return Ok(g.nullable_start);
    }
    let nt = g.nonterminal_count;
    // table[(len - 1) * n + i] = nonterminals deriving w[i .. i + len]
    let mut table = vec![vec![false; nt]; n * n];
    for (i, &a) in w.iter().enumerate() {
        for &(lhs, t) in &g.terminal {
            if t == a {
                table[i][lhs] = true;
            }
        }
    }
    for len in 2..=n {
        for i in 0..=n - len {
            let mut cell = vec![false; nt];
            for split in 1..len {
                let left = &table[(split - 1) * n + i];
                let right = &table[(len - split - 1) * n + i + split];
                for &(a, b, c) in &g.binary {
                    if left[b] && right[c] {
                        cell[a] = true;
                    }
                }
            }
            table[(len - 1) * n + i] = cell;
        }
    }
    Ok(table[(n - 1) * n][g.start])
}

/// Whether `root =>* w` in a context-free grammar.
pub fn nonterminal_member(g: &PlainGrammar, root: Symbol, w: &[Symbol]) -> Result<bool, EngineError> {
    if !g.symbols.contains(root) || !g.symbols.is_nonterminal(root) {
        let name = if g.symbols.contains(root) {
            g.symbols.name(root).to_owned()
        } else {
            format!("#{}", root.index())
        };
        return Err(EngineError::UnknownNonterminal(name));
    }
    cyk_member(&to_cnf(&g.rooted_at(root))?, w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::{Mode, Production};

    fn ab_grammar() -> PlainGrammar {
        let mut t = SymbolTable::new();
        let s = t.nonterminal("S");
        let a_nt = t.nonterminal("A");
        let b_nt = t.nonterminal("B");
        let a = t.terminal("a");
        let b = t.terminal("b");
        let rules = vec![
            Production::unary(s, vec![a_nt, b_nt]),
            Production::unary(a_nt, vec![a]),
            Production::unary(b_nt, vec![b]),
        ];
        PlainGrammar::new(t, rules, s, Mode::ContextFree)
    }

    #[test]
    fn near_cnf_grammar_keeps_its_language() {
        let g = ab_grammar();
        let cnf = to_cnf(&g).unwrap();
        let ab = g.symbols.parse_word("a b").unwrap();
        let aa = g.symbols.parse_word("a a").unwrap();
        assert!(cyk_member(&cnf, &ab).unwrap());
        assert!(!cyk_member(&cnf, &aa).unwrap());
        assert!(!cyk_member(&cnf, &[]).unwrap());
    }

    #[test]
    fn epsilon_only_language() {
        let mut t = SymbolTable::new();
        let s = t.nonterminal("S");
        t.terminal("a");
        let g = PlainGrammar::new(t, vec![Production::unary(s, vec![])], s, Mode::ContextFree);
        let cnf = to_cnf(&g).unwrap();
        assert!(cnf.nullable_start());
        assert!(cnf.binary_rules().is_empty() && cnf.terminal_rules().is_empty());
        assert!(cyk_member(&cnf, &[]).unwrap());
    }

    #[test]
    fn unknown_terminal_is_an_error() {
        let g = ab_grammar();
        let cnf = to_cnf(&g).unwrap();
        let s = g.symbols.get("S").unwrap();
        assert_eq!(cyk_member(&cnf, &[s]), Err(EngineError::UnknownTerminal("S".into())));
    }

    #[test]
    fn rejects_context_sensitive_rules() {
        let mut t = SymbolTable::new();
        let s = t.nonterminal("S");
        let a = t.terminal("a");
        let g = PlainGrammar::new(t, vec![Production::new(vec![s, s], vec![a])], s, Mode::ContextSensitive);
        assert_eq!(to_cnf(&g).unwrap_err(), EngineError::NotContextFree);
    }

    #[test]
    fn nonterminal_rooted_membership() {
        let g = ab_grammar();
        let b_nt = g.symbols.get("B").unwrap();
        let b = g.symbols.parse_word("b").unwrap();
        assert!(nonterminal_member(&g, b_nt, &b).unwrap());
        let bad = g.symbols.get("a").unwrap();
        assert!(matches!(
            nonterminal_member(&g, bad, &b),
            Err(EngineError::UnknownNonterminal(_))
        ));
    }
}
