//! Breadth-first search over sentential forms.
//!
//! The search explores only *left-to-right* derivations: after a rule is
//! applied at position `p`, the next rule's window must end after `p`. Any
//! derivation can be reordered into this shape (a step that lies entirely to
//! the left of its predecessor commutes with it), so the restriction loses no
//! derivable word. For context-free grammars it collapses to leftmost
//! derivation. A symbol that occurs at no non-final position of any
//! left-hand side and sits left of the cursor freezes itself and everything
//! before it: no later window can reach it. Forms with a frozen nonterminal
//! are dead, and a frozen terminal prefix must match the target.
//!
//! Other prunings are sound by construction: terminals that occur in no
//! left-hand side are permanent, so the terminal skeleton of a form must
//! embed in the target; in CF mode the minimum yield of a form bounds its
//! final length; and an optional caller-supplied [`Potential`] that never
//! decreases along any rule bounds forms by the target's weight, and fixes
//! it exactly once no symbol that could still raise it remains. Callers may
//! add their own dead-form test through [`SearchHints`].
//!
//! Length pruning is the only lossy one. It is exact in CF mode once the
//! length cap reaches [`cf_completeness_bound`]; otherwise a search that
//! pruned by length and found nothing answers [`Verdict::Unknown`].

use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;
use std::rc::Rc;

use super::chart::chart_derive;
use super::{ensure_valid, DerivationBudget, EngineError};
use crate::grammar::{PlainGrammar, Production};
use crate::symbol::{Symbol, SymbolTable, Word};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Yes,
    No,
    /// The search was cut short by the budget before reaching a verdict.
    Unknown,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Yes => "yes",
            Verdict::No => "no",
            Verdict::Unknown => "unknown",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerivationStep {
    /// Index into the grammar's rule list.
    pub rule: usize,
    /// Offset of the rewritten window in the previous form.
    pub position: usize,
    /// Form after the rewrite.
    pub form: Word,
}

/// A sequence of single-rule rewrites.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Derivation {
    pub origin: Word,
    pub steps: Vec<DerivationStep>,
}

impl Derivation {
    pub fn result(&self) -> &[Symbol] {
        self.steps.last().map_or(&self.origin, |s| &s.form)
    }

    /// Checks that each step rewrites exactly one occurrence of its rule's
    /// left-hand side into the right-hand side.
    pub fn replay(&self, rules: &[Production]) -> bool {
        let mut current: &[Symbol] = &self.origin;
        for step in &self.steps {
            let Some(rule) = rules.get(step.rule) else { return false };
            let end = step.position + rule.lhs.len();
            if end > current.len() || current[step.position..end] != rule.lhs[..] {
                return false;
            }
            let mut next = current[..step.position].to_vec();
            next.extend_from_slice(&rule.rhs);
            next.extend_from_slice(&current[end..]);
            if next != step.form {
                return false;
            }
            current = &step.form;
        }
        true
    }

    /// One sentential form per line; every line after the first names the rule
    /// that produced it.
    pub fn render(&self, g: &PlainGrammar) -> String {
        let mut out = g.symbols.render(&self.origin);
        for step in &self.steps {
            let rule = &g.rules[step.rule];
            let _ = write!(
                out,
                "\n{}\t[{} @ {}]",
                g.symbols.render(&step.form),
                rule.render(&g.symbols),
                step.position
            );
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MembershipAnswer {
    pub verdict: Verdict,
    /// Present exactly when the verdict is [`Verdict::Yes`].
    pub witness: Option<Derivation>,
    pub forms_visited: usize,
}

/// Nonnegative symbol weights. A potential is usable for pruning only if no
/// rule decreases it, which [`Potential::check_monotone`] verifies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Potential {
    weights: Vec<u64>,
}

impl Potential {
    pub fn zero(table: &SymbolTable) -> Self {
        Potential {
            weights: vec![0; table.len()],
        }
    }

    pub fn set(&mut self, sym: Symbol, weight: u64) {
        if sym.index() >= self.weights.len() {
            self.weights.resize(sym.index() + 1, 0);
        }
        self.weights[sym.index()] = weight;
    }

    pub fn weight_of(&self, sym: Symbol) -> u64 {
        self.weights.get(sym.index()).copied().unwrap_or(0)
    }

    pub fn weight(&self, form: &[Symbol]) -> u64 {
        form.iter().map(|&s| self.weight_of(s)).sum()
    }

    pub fn check_monotone(&self, g: &PlainGrammar) -> Result<(), EngineError> {
        match g.rules.iter().find(|r| self.weight(&r.lhs) > self.weight(&r.rhs)) {
            Some(r) => Err(EngineError::PotentialNotMonotone(r.render(&g.symbols))),
            None => Ok(()),
        }
    }
}

/// Form length beyond which no leftmost derivation of a word of length
/// `word_len` needs to go, for a context-free grammar.
///
/// A smallest derivation tree repeats no (nonterminal, yield span) pair on a
/// root path, so its height is at most `|V| (|w| + 1)`; a leftmost form holds
/// the matched prefix, one nonterminal and at most `r - 1` pending siblings
/// per level, `r` being the longest right-hand side.
pub fn cf_completeness_bound(g: &PlainGrammar, word_len: usize) -> usize {
    let r = g.rules.iter().map(|p| p.rhs.len()).max().unwrap_or(1).max(1);
    let v = g.symbols.nonterminals().count();
    word_len + 1 + (r - 1) * v * (word_len + 1)
}

/// Membership of `w` from the start symbol.
///
/// Context-free grammars are decided exactly by a span chart over the
/// original rules (no normal form), ignoring `budget`; `forms_visited` then
/// counts chart items. Other grammars go through [`derive`].
pub fn brute_force_member(
    g: &PlainGrammar,
    w: &[Symbol],
    budget: &DerivationBudget,
) -> Result<MembershipAnswer, EngineError> {
    if !g.is_context_free() {
        return derive(g, &[g.start], w, budget, None);
    }
    ensure_valid(g)?;
    DerivationBudget::new(budget.max_len, budget.max_forms)?;
    check_word(g, w)?;
    let (witness, items) = chart_derive(g, g.start, w);
    let verdict = if witness.is_some() { Verdict::Yes } else { Verdict::No };
    Ok(MembershipAnswer {
        verdict,
        witness,
        forms_visited: items,
    })
}

fn check_word(g: &PlainGrammar, w: &[Symbol]) -> Result<(), EngineError> {
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
    Ok(())
}

/// Searches for a derivation `root =>* w`.
pub fn derive(
    g: &PlainGrammar,
    root: &[Symbol],
    w: &[Symbol],
    budget: &DerivationBudget,
    potential: Option<&Potential>,
) -> Result<MembershipAnswer, EngineError> {
    derive_with(
        g,
        root,
        w,
        budget,
        SearchHints {
            potential,
            dead_form: None,
        },
    )
}

/// Caller knowledge that sharpens [`derive_with`]. Both fields must be sound:
/// a pruned form must not derive the target.
#[derive(Clone, Copy, Default)]
pub struct SearchHints<'a> {
    pub potential: Option<&'a Potential>,
    /// True for forms that cannot derive the target.
    pub dead_form: Option<&'a dyn Fn(&[Symbol]) -> bool>,
}

/// [`derive`] with an optional dead-form test.
pub fn derive_with(
    g: &PlainGrammar,
    root: &[Symbol],
    w: &[Symbol],
    budget: &DerivationBudget,
    hints: SearchHints<'_>,
) -> Result<MembershipAnswer, EngineError> {
    let potential = hints.potential;
    ensure_valid(g)?;
    DerivationBudget::new(budget.max_len, budget.max_forms)?;
    check_word(g, w)?;
    if let Some(p) = potential {
        p.check_monotone(g)?;
    }
    let explorer = Explorer::new(g);
    let target_weight = potential.map(|p| p.weight(w));
    let min_yield = explorer.context_free.then(|| min_yields(g));
    let skeleton = !explorer.terminal_in_lhs;

    let growers = potential.map(|p| growing_symbols(g, p));

    let prune = |form: &[Symbol], frozen: usize| -> bool {
        if frozen > w.len() || form[..frozen] != w[..frozen] {
            return true;
        }
        if let (Some(p), Some(limit), Some(grow)) = (potential, target_weight, &growers) {
            let weight = p.weight(form);
            if weight > limit || (weight < limit && !form.iter().any(|s| grow[s.index()])) {
                return true;
            }
        }
        if hints.dead_form.is_some_and(|dead| dead(form)) {
            return true;
        }
        if let Some(my) = &min_yield {
            let total = form.iter().try_fold(0usize, |acc, &s| {
                let y = if g.symbols.is_terminal(s) { 1 } else { my[s.index()] };
                (y != usize::MAX).then(|| acc + y)
            });
            match total {
                Some(t) if t <= w.len() => {}
                _ => return true,
            }
        }
        skeleton && !skeleton_fits(&g.symbols, form, w)
    };

    let outcome = explorer.explore(root, budget, &prune, |form| form == w);
    let length_exact = explorer.context_free && budget.max_len >= cf_completeness_bound(g, w.len());
    let verdict = match outcome.found {
        Some(_) => Verdict::Yes,
        None if outcome.cap_hit || (outcome.pruned_by_length && !length_exact) => Verdict::Unknown,
        None => Verdict::No,
    };
    Ok(MembershipAnswer {
        verdict,
        witness: outcome.found.map(|idx| outcome.witness(idx)),
        forms_visited: outcome.nodes.len(),
    })
}

/// Terminal-only forms of length at most `max_len` reachable from `root`.
/// Returns the words and whether the search completed within budget.
pub(crate) fn collect_terminal_forms(
    g: &PlainGrammar,
    root: &[Symbol],
    max_len: usize,
    budget: &DerivationBudget,
) -> (Vec<Word>, bool) {
    let explorer = Explorer::new(g);
    let permanent_terminals = !explorer.terminal_in_lhs;
    let prune = |form: &[Symbol], _frozen: usize| {
        permanent_terminals && form.iter().filter(|&&s| g.symbols.is_terminal(s)).count() > max_len
    };
    let mut words = Vec::new();
    let outcome = explorer.explore(root, budget, &prune, |form| {
        if form.len() <= max_len && form.iter().all(|&s| g.symbols.is_terminal(s)) {
            words.push(form.to_vec());
        }
        false
    });
    (words, !outcome.cap_hit && !outcome.pruned_by_length)
}

/// Symbols from which some rule raising `p` is still reachable: the left-hand
/// sides of raising rules, closed under "occurs in a left-hand side whose
/// right-hand side holds such a symbol".
fn growing_symbols(g: &PlainGrammar, p: &Potential) -> Vec<bool> {
    let mut grow = vec![false; g.symbols.len()];
    for r in g.rules.iter().filter(|r| p.weight(&r.rhs) > p.weight(&r.lhs)) {
        for &s in &r.lhs {
            grow[s.index()] = true;
        }
    }
    loop {
        let mut changed = false;
        for r in &g.rules {
            if r.rhs.iter().any(|s| grow[s.index()]) {
                for &s in &r.lhs {
                    changed |= !std::mem::replace(&mut grow[s.index()], true);
                }
            }
        }
        if !changed {
            return grow;
        }
    }
}

/// Embeds the permanent terminals of `form` into `w`: the all-terminal prefix
/// and suffix must match exactly and the rest must occur in order.
fn skeleton_fits(table: &SymbolTable, form: &[Symbol], w: &[Symbol]) -> bool {
    let is_t = |s: &Symbol| table.is_terminal(*s);
    let prefix = form.iter().take_while(|s| is_t(s)).count();
    if prefix == form.len() {
        return form == w;
    }
    let suffix = form.iter().rev().take_while(|s| is_t(s)).count();
    if prefix + suffix > w.len()
        || form[..prefix] != w[..prefix]
        || form[form.len() - suffix..] != w[w.len() - suffix..]
    {
        return false;
    }
    let mut rest = w[prefix..w.len() - suffix].iter();
    form[prefix..form.len() - suffix]
        .iter()
        .filter(|s| is_t(s))
        .all(|t| rest.any(|x| x == t))
}

/// Shortest terminal yield per symbol index; `usize::MAX` when unproductive.
fn min_yields(g: &PlainGrammar) -> Vec<usize> {
    let mut my = vec![usize::MAX; g.symbols.len()];
    for t in g.symbols.terminals() {
        my[t.index()] = 1;
    }
    loop {
        let mut changed = false;
        for r in &g.rules {
            let total = r.rhs.iter().try_fold(0usize, |acc, s| {
                let y = my[s.index()];
                (y != usize::MAX).then(|| acc + y)
            });
            if let Some(t) = total {
                let head = r.lhs[0].index();
                if t < my[head] {
                    my[head] = t;
                    changed = true;
                }
            }
        }
        if !changed {
            return my;
        }
    }
}

struct Node {
    form: Rc<[Symbol]>,
    parent: usize,
    rule: usize,
    position: usize,
}

struct Outcome {
    nodes: Vec<Node>,
    found: Option<usize>,
    pruned_by_length: bool,
    cap_hit: bool,
}

impl Outcome {
    fn witness(&self, mut idx: usize) -> Derivation {
        let mut steps = Vec::new();
        while self.nodes[idx].parent != usize::MAX {
            let node = &self.nodes[idx];
            steps.push(DerivationStep {
                rule: node.rule,
                position: node.position,
                form: node.form.to_vec(),
            });
            idx = node.parent;
        }
        steps.reverse();
        Derivation {
            origin: self.nodes[idx].form.to_vec(),
            steps,
        }
    }
}

struct Explorer<'g> {
    g: &'g PlainGrammar,
    by_first: HashMap<Symbol, Vec<usize>>,
    /// Symbols at a non-final position of some left-hand side.
    non_last: Vec<bool>,
    terminal_in_lhs: bool,
    context_free: bool,
}

impl<'g> Explorer<'g> {
    fn new(g: &'g PlainGrammar) -> Self {
        let mut by_first: HashMap<Symbol, Vec<usize>> = HashMap::new();
        let mut non_last = vec![false; g.symbols.len()];
        let mut terminal_in_lhs = false;
        for (i, r) in g.rules.iter().enumerate() {
            by_first.entry(r.lhs[0]).or_default().push(i);
            terminal_in_lhs |= r.lhs.iter().any(|&s| g.symbols.is_terminal(s));
            for &s in &r.lhs[..r.lhs.len() - 1] {
                non_last[s.index()] = true;
            }
        }
        Explorer {
            g,
            by_first,
            non_last,
            terminal_in_lhs,
            context_free: g.is_context_free(),
        }
    }

    fn explore(
        &self,
        root: &[Symbol],
        budget: &DerivationBudget,
        prune: &dyn Fn(&[Symbol], usize) -> bool,
        mut stop_at: impl FnMut(&[Symbol]) -> bool,
    ) -> Outcome {
        let mut out = Outcome {
            nodes: Vec::new(),
            found: None,
            pruned_by_length: false,
            cap_hit: false,
        };
        let root: Rc<[Symbol]> = root.into();
        out.nodes.push(Node {
            form: Rc::clone(&root),
            parent: usize::MAX,
            rule: 0,
            position: 0,
        });
        if stop_at(&root) {
            out.found = Some(0);
            return out;
        }
        // smallest cursor each form has been queued with
        let mut best: HashMap<Rc<[Symbol]>, usize> = HashMap::new();
        best.insert(root, 0);
        let mut queue: VecDeque<(usize, usize)> = VecDeque::from([(0, 0)]);

        while let Some((idx, cursor)) = queue.pop_front() {
            let form = Rc::clone(&out.nodes[idx].form);
            // a nonterminal left of the next cursor that cannot open a window is frozen
            let horizon = form
                .iter()
                .position(|&s| !self.non_last[s.index()] && self.g.symbols.is_nonterminal(s))
                .unwrap_or(form.len());
            for pos in 0..form.len().min(horizon + 1) {
                let Some(candidates) = self.by_first.get(&form[pos]) else {
                    continue;
                };
                for &ri in candidates {
                    let rule = &self.g.rules[ri];
                    let end = pos + rule.lhs.len();
                    if end <= cursor || end > form.len() || form[pos..end] != rule.lhs[..] {
                        continue;
                    }
                    let new_len = form.len() - rule.lhs.len() + rule.rhs.len();
                    let mut next = Vec::with_capacity(new_len);
                    next.extend_from_slice(&form[..pos]);
                    next.extend_from_slice(&rule.rhs);
                    next.extend_from_slice(&form[end..]);
                    let frozen = next[..pos]
                        .iter()
                        .rposition(|s| !self.non_last[s.index()])
                        .map_or(0, |i| i + 1);
                    if next[..frozen].iter().any(|&s| self.g.symbols.is_nonterminal(s)) {
                        continue;
                    }
                    // sound prunes first, so only live forms count as cut by length
                    if prune(&next, frozen) {
                        continue;
                    }
                    if new_len > budget.max_len {
                        out.pruned_by_length = true;
                        continue;
                    }
                    let next: Rc<[Symbol]> = next.into();
                    match best.get(&next) {
                        Some(&c) if c <= pos => continue,
                        _ => {}
                    }
                    if out.nodes.len() >= budget.max_forms {
                        out.cap_hit = true;
                        return out;
                    }
                    best.insert(Rc::clone(&next), pos);
                    out.nodes.push(Node {
                        form: Rc::clone(&next),
                        parent: idx,
                        rule: ri,
                        position: pos,
                    });
                    let new_idx = out.nodes.len() - 1;
                    if stop_at(&next) {
                        out.found = Some(new_idx);
                        return out;
                    }
                    queue.push_back((new_idx, pos));
                }
            }
        }
        out
    }
}
