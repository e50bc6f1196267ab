//! Parametric grammars: production groups, parameter settings and their
//! instantiation into plain grammars.
//!
//! An `(n, k)` grammar holds `n` ordered production groups of `k` alternatives
//! each. A [`ParameterSetting`] picks one alternative (1-based) per group, and
//! [`Ppcfg::instantiate`] turns the picks into an ordinary rule set. The same
//! types carry context-sensitive grammars, where a left-hand side may be any
//! nonempty string containing a nonterminal.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use crate::engines::{self, DerivationBudget, EngineError};
use crate::symbol::{Symbol, SymbolKind, SymbolTable, Word};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    ContextFree,
    ContextSensitive,
}

impl Mode {
    pub fn keyword(self) -> &'static str {
        match self {
            Mode::ContextFree => "ppcfg",
            Mode::ContextSensitive => "ppcsg",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Production {
    pub lhs: Vec<Symbol>,
    pub rhs: Vec<Symbol>,
}

impl Production {
    pub fn new(lhs: Vec<Symbol>, rhs: Vec<Symbol>) -> Self {
        Production { lhs, rhs }
    }

    /// `head -> rhs` with a single-symbol left-hand side.
    pub fn unary(head: Symbol, rhs: Vec<Symbol>) -> Self {
        Production { lhs: vec![head], rhs }
    }

    pub fn is_epsilon(&self) -> bool {
        self.rhs.is_empty()
    }

    pub fn render(&self, table: &SymbolTable) -> String {
        format!("{} -> {}", table.display(&self.lhs), table.display(&self.rhs))
    }
}

/// One principle: an ordered list of candidate productions.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ProductionGroup {
    pub alternatives: Vec<Production>,
}

impl ProductionGroup {
    pub fn new(alternatives: Vec<Production>) -> Self {
        ProductionGroup { alternatives }
    }

    /// A group holding `k` copies of one production.
    pub fn padded(prod: Production, k: usize) -> Self {
        ProductionGroup {
            alternatives: vec![prod; k],
        }
    }

    pub fn arity(&self) -> usize {
        self.alternatives.len()
    }

    /// True when the choice made for this group can change the instantiated rule set.
    pub fn is_choice_bearing(&self) -> bool {
        self.alternatives.windows(2).any(|w| w[0] != w[1])
    }
}

/// A principled parametric grammar `(V, Σ, Π, S)`.
///
/// Construction does not enforce well-formedness; call [`Ppcfg::validate`].
/// Groups with differing arities are representable so that the padding
/// transform has something to consume.
#[derive(Debug, Clone)]
pub struct Ppcfg {
    pub symbols: Arc<SymbolTable>,
    pub groups: Vec<ProductionGroup>,
    pub start: Symbol,
    pub mode: Mode,
}

impl Ppcfg {
    pub fn new(symbols: SymbolTable, groups: Vec<ProductionGroup>, start: Symbol, mode: Mode) -> Self {
        Ppcfg {
            symbols: Arc::new(symbols),
            groups,
            start,
            mode,
        }
    }

    /// Number of production groups.
    pub fn n(&self) -> usize {
        self.groups.len()
    }

    /// Alternatives per group, if every group has the same nonzero count.
    pub fn k(&self) -> Option<usize> {
        let first = self.groups.first().map_or(1, ProductionGroup::arity);
        (first > 0 && self.groups.iter().all(|g| g.arity() == first)).then_some(first)
    }

    pub fn is_homogeneous(&self) -> bool {
        self.k().is_some()
    }

    pub fn choice_groups(&self) -> Vec<usize> {
        (0..self.n()).filter(|&i| self.groups[i].is_choice_bearing()).collect()
    }

    /// Upper bound on `|Λ(Γ)|`: the product of the group arities.
    pub fn setting_count(&self) -> u128 {
        self.groups
            .iter()
            .try_fold(1u128, |acc, g| acc.checked_mul(g.arity() as u128))
            .unwrap_or(u128::MAX)
    }

    pub fn validate(&self) -> ValidationReport {
        self.validate_as(self.mode)
    }

    /// Validates the grammar as though it had been declared in `mode`.
    pub fn validate_as(&self, mode: Mode) -> ValidationReport {
        let mut report = ValidationReport::default();
        check_symbols(&self.symbols, self.start, &mut report);
        let expected = self.groups.first().map(ProductionGroup::arity);
        for (gi, group) in self.groups.iter().enumerate() {
            if group.alternatives.is_empty() {
                report.push(Violation::EmptyGroup { group: gi + 1 });
                continue;
            }
            if let Some(k) = expected {
                if group.arity() != k {
                    report.push(Violation::GroupArity {
                        group: gi + 1,
                        expected: k,
                        found: group.arity(),
                    });
                }
            }
            for (ai, prod) in group.alternatives.iter().enumerate() {
                check_production(&self.symbols, prod, mode, Some((gi + 1, ai + 1)), &mut report);
            }
        }
        report.dedup_undeclared();
        report
    }

    pub fn check_setting(&self, p: &ParameterSetting) -> Result<(), GrammarError> {
        if p.len() != self.n() {
            return Err(GrammarError::SettingLength {
                expected: self.n(),
                found: p.len(),
            });
        }
        for (i, (&choice, group)) in p.choices().iter().zip(&self.groups).enumerate() {
            if choice == 0 || choice > group.arity() {
                return Err(GrammarError::ChoiceOutOfRange {
                    group: i + 1,
                    choice,
                    arity: group.arity(),
                });
            }
        }
        Ok(())
    }

    /// Builds `Γ_p`: rule `i` is alternative `p_i` of group `i`, in group order.
    pub fn instantiate(&self, p: &ParameterSetting) -> Result<PlainGrammar, GrammarError> {
        let report = self.validate();
        if !report.is_ok() {
            return Err(GrammarError::Invalid(report));
        }
        self.check_setting(p)?;
        Ok(self.instantiate_unchecked(p))
    }

    /// Instantiation without validation, for hot loops over settings that were
    /// produced by [`Ppcfg::settings`] on a validated grammar.
    pub fn instantiate_unchecked(&self, p: &ParameterSetting) -> PlainGrammar {
        let rules = self
            .groups
            .iter()
            .zip(p.choices())
            .map(|(g, &c)| g.alternatives[c - 1].clone())
            .collect();
        PlainGrammar {
            symbols: Arc::clone(&self.symbols),
            rules,
            start: self.start,
            mode: self.mode,
        }
    }

    /// All settings in lexicographic order, last group varying fastest.
    pub fn settings(&self) -> SettingIter {
        SettingIter::new(self.groups.iter().map(ProductionGroup::arity).collect())
    }

    /// Setting that takes `choices` for the choice-bearing groups (in order) and
    /// 1 everywhere else.
    pub fn expand_choice_setting(&self, choices: &[usize]) -> Result<ParameterSetting, GrammarError> {
        let groups = self.choice_groups();
        if choices.len() != groups.len() {
            return Err(GrammarError::SettingLength {
                expected: groups.len(),
                found: choices.len(),
            });
        }
        let mut full = vec![1; self.n()];
        for (&gi, &c) in groups.iter().zip(choices) {
            full[gi] = c;
        }
        let p = ParameterSetting::new(full);
        self.check_setting(&p)?;
        Ok(p)
    }

    /// The set of distinct bounded languages over all settings.
    ///
    /// Context-free grammars are enumerated exactly; context-sensitive ones
    /// use `budget`, and settings whose search was cut short are listed in
    /// [`BoundedLanguageSet::incomplete`].
    pub fn bounded_language_family(
        &self,
        length_bound: usize,
        budget: &DerivationBudget,
    ) -> Result<BoundedLanguageSet, EngineError> {
        let report = self.validate();
        if !report.is_ok() {
            return Err(EngineError::Grammar(GrammarError::Invalid(report)));
        }
        let mut family = BoundedLanguageSet {
            length_bound,
            languages: BTreeSet::new(),
            incomplete: Vec::new(),
        };
        for p in self.settings() {
            let plain = self.instantiate_unchecked(&p);
            let lang = engines::enumerate_language(&plain, length_bound, budget)?;
            if !lang.complete {
                family.incomplete.push(p);
            }
            family.languages.insert(lang.words);
        }
        Ok(family)
    }
}

/// Structural equality up to symbol renumbering: compares names, not handles.
impl PartialEq for Ppcfg {
    fn eq(&self, other: &Self) -> bool {
        let names = |g: &Ppcfg, syms: &[Symbol]| -> Vec<String> {
            syms.iter().map(|&s| g.symbols.name(s).to_owned()).collect()
        };
        self.mode == other.mode
            && self.symbols == other.symbols
            && self.symbols.name(self.start) == other.symbols.name(other.start)
            && self.groups.len() == other.groups.len()
            && self.groups.iter().zip(&other.groups).all(|(a, b)| {
                a.arity() == b.arity()
                    && a.alternatives.iter().zip(&b.alternatives).all(|(x, y)| {
                        names(self, &x.lhs) == names(other, &y.lhs) && names(self, &x.rhs) == names(other, &y.rhs)
                    })
            })
    }
}

fn check_symbols(table: &SymbolTable, start: Symbol, report: &mut ValidationReport) {
    if !table.contains(start) || table.kind(start) != SymbolKind::Nonterminal {
        let name = if table.contains(start) {
            table.name(start).to_owned()
        } else {
            format!("#{}", start.index())
        };
        report.push(Violation::StartNotNonterminal { name });
    }
}

fn check_production(
    table: &SymbolTable,
    prod: &Production,
    mode: Mode,
    at: Option<(usize, usize)>,
    report: &mut ValidationReport,
) {
    let (group, alternative) = at.unwrap_or((0, 0));
    for &s in prod.lhs.iter().chain(&prod.rhs) {
        if !table.contains(s) || table.kind(s) == SymbolKind::Undeclared {
            let name = if table.contains(s) {
                table.name(s).to_owned()
            } else {
                format!("#{}", s.index())
            };
            report.push(Violation::UndeclaredSymbol { name });
        }
    }
    if prod.lhs.is_empty() {
        report.push(Violation::EmptyLhs { group, alternative });
        return;
    }
    let nonterminal = |s: &Symbol| table.contains(*s) && table.is_nonterminal(*s);
    match mode {
        Mode::ContextFree => {
            if prod.lhs.len() > 1 {
                report.push(Violation::MultiSymbolLhsInCf {
                    group,
                    alternative,
                    rule: prod.render(table),
                });
            } else if !nonterminal(&prod.lhs[0]) && table.kind(prod.lhs[0]) == SymbolKind::Terminal {
                report.push(Violation::TerminalLhs {
                    group,
                    alternative,
                    rule: prod.render(table),
                });
            }
        }
        Mode::ContextSensitive => {
            if !prod.lhs.iter().any(nonterminal) && prod.lhs.iter().all(|&s| table.contains(s) && table.is_terminal(s))
            {
                report.push(Violation::TerminalLhs {
                    group,
                    alternative,
                    rule: prod.render(table),
                });
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    UndeclaredSymbol {
        name: String,
    },
    StartNotNonterminal {
        name: String,
    },
    EmptyGroup {
        group: usize,
    },
    GroupArity {
        group: usize,
        expected: usize,
        found: usize,
    },
    EmptyLhs {
        group: usize,
        alternative: usize,
    },
    MultiSymbolLhsInCf {
        group: usize,
        alternative: usize,
        rule: String,
    },
    TerminalLhs {
        group: usize,
        alternative: usize,
        rule: String,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::UndeclaredSymbol { name } => write!(f, "undeclared symbol `{name}`"),
            Violation::StartNotNonterminal { name } => write!(f, "start symbol `{name}` is not a nonterminal"),
            Violation::EmptyGroup { group } => write!(f, "group {group}: no alternatives"),
            Violation::GroupArity { group, expected, found } => {
                write!(
                    f,
                    "group arity: group {group} has {found} alternatives, expected {expected}"
                )
            }
            Violation::EmptyLhs { group, alternative } => {
                write!(f, "group {group} alternative {alternative}: empty lhs")
            }
            Violation::MultiSymbolLhsInCf {
                group,
                alternative,
                rule,
            } => {
                write!(
                    f,
                    "multi-symbol lhs in CF mode: group {group} alternative {alternative}: {rule}"
                )
            }
            Violation::TerminalLhs {
                group,
                alternative,
                rule,
            } => {
                write!(
                    f,
                    "lhs without a nonterminal: group {group} alternative {alternative}: {rule}"
                )
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    fn push(&mut self, v: Violation) {
        self.violations.push(v);
    }

    fn dedup_undeclared(&mut self) {
        let mut seen = BTreeSet::new();
        self.violations.retain(|v| match v {
            Violation::UndeclaredSymbol { name } => seen.insert(name.clone()),
            _ => true,
        });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            return f.write_str("ok");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                f.write_str("\n")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GrammarError {
    #[error("invalid grammar:\n{0}")]
    Invalid(ValidationReport),
    #[error("setting has {found} entries, grammar expects {expected}")]
    SettingLength { expected: usize, found: usize },
    #[error("group {group}: choice {choice} outside 1..={arity}")]
    ChoiceOutOfRange { group: usize, choice: usize, arity: usize },
    #[error("cannot parse setting `{0}`")]
    BadSetting(String),
}

/// One 1-based choice per production group.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ParameterSetting(Vec<usize>);

impl ParameterSetting {
    pub fn new(choices: Vec<usize>) -> Self {
        ParameterSetting(choices)
    }

    pub fn all_first(n: usize) -> Self {
        ParameterSetting(vec![1; n])
    }

    /// Bit `i` of the string maps `0` to choice 1 and `1` to choice 2.
    pub fn from_bits(bits: &str) -> Result<Self, GrammarError> {
        bits.chars()
            .map(|c| match c {
                '0' => Ok(1),
                '1' => Ok(2),
                _ => Err(GrammarError::BadSetting(bits.to_owned())),
            })
            .collect::<Result<_, _>>()
            .map(ParameterSetting)
    }

    /// Inverse of [`ParameterSetting::from_bits`]; `None` if any choice exceeds 2.
    pub fn to_bits(&self) -> Option<String> {
        self.0
            .iter()
            .map(|&c| match c {
                1 => Some('0'),
                2 => Some('1'),
                _ => None,
            })
            .collect()
    }

    pub fn choices(&self) -> &[usize] {
        &self.0
    }

    pub fn choices_mut(&mut self) -> &mut [usize] {
        &mut self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<usize> {
        self.0
    }
}

impl fmt::Display for ParameterSetting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// Odometer over all settings of a grammar with the given group arities.
#[derive(Debug, Clone)]
pub struct SettingIter {
    arities: Vec<usize>,
    next: Option<Vec<usize>>,
}

impl SettingIter {
    pub fn new(arities: Vec<usize>) -> Self {
        let next = (!arities.contains(&0)).then(|| vec![1; arities.len()]);
        SettingIter { arities, next }
    }
}

impl Iterator for SettingIter {
    type Item = ParameterSetting;

    fn next(&mut self) -> Option<ParameterSetting> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        let mut i = succ.len();
        loop {
            if i == 0 {
                break;
            }
            i -= 1;
            if succ[i] < self.arities[i] {
                succ[i] += 1;
                self.next = Some(succ);
                break;
            }
            succ[i] = 1;
        }
        Some(ParameterSetting(current))
    }
}

/// An instantiated grammar `Γ_p = (V, Σ, R, S)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlainGrammar {
    pub symbols: Arc<SymbolTable>,
    pub rules: Vec<Production>,
    pub start: Symbol,
    pub mode: Mode,
}

impl PlainGrammar {
    pub fn new(symbols: SymbolTable, rules: Vec<Production>, start: Symbol, mode: Mode) -> Self {
        PlainGrammar {
            symbols: Arc::new(symbols),
            rules,
            start,
            mode,
        }
    }

    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        check_symbols(&self.symbols, self.start, &mut report);
        for (i, rule) in self.rules.iter().enumerate() {
            check_production(&self.symbols, rule, self.mode, Some((i + 1, 1)), &mut report);
        }
        report.dedup_undeclared();
        report
    }

    /// True when every rule rewrites a single nonterminal, whatever the declared mode.
    pub fn is_context_free(&self) -> bool {
        self.rules
            .iter()
            .all(|r| r.lhs.len() == 1 && self.symbols.is_nonterminal(r.lhs[0]))
    }

    /// Same rules with a different start symbol.
    pub fn rooted_at(&self, root: Symbol) -> PlainGrammar {
        PlainGrammar {
            start: root,
            ..self.clone()
        }
    }

    /// Each rule becomes a single-alternative group.
    pub fn to_ppcfg(&self) -> Ppcfg {
        Ppcfg {
            symbols: Arc::clone(&self.symbols),
            groups: self
                .rules
                .iter()
                .map(|r| ProductionGroup::new(vec![r.clone()]))
                .collect(),
            start: self.start,
            mode: self.mode,
        }
    }
}

/// Distinct languages of `Γ` truncated at a length bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundedLanguageSet {
    pub length_bound: usize,
    pub languages: BTreeSet<BTreeSet<Word>>,
    /// Settings whose enumeration hit the derivation budget (CS mode only).
    pub incomplete: Vec<ParameterSetting>,
}

impl BoundedLanguageSet {
    pub fn len(&self) -> usize {
        self.languages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.languages.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::build_adversary_grammar;

    fn budget() -> DerivationBudget {
        DerivationBudget::default()
    }

    #[test]
    fn settings_enumerate_lexicographically() {
        let all: Vec<_> = SettingIter::new(vec![2, 2, 2]).collect();
        assert_eq!(all.len(), 8);
        assert_eq!(all[0].choices(), &[1, 1, 1]);
        assert_eq!(all[1].choices(), &[1, 1, 2]);
        assert_eq!(all[7].choices(), &[2, 2, 2]);

        let single: Vec<_> = SettingIter::new(vec![3]).map(ParameterSetting::into_inner).collect();
        assert_eq!(single, vec![vec![1], vec![2], vec![3]]);

        let empty: Vec<_> = SettingIter::new(vec![]).collect();
        assert_eq!(empty, vec![ParameterSetting::new(vec![])]);
    }

    #[test]
    fn adversary_grammar_is_valid_and_instantiates() {
        let g = build_adversary_grammar(2);
        assert!(g.validate().is_ok());
        let plain = g.instantiate(&ParameterSetting::new(vec![1, 1, 2])).unwrap();
        let rendered: Vec<_> = plain.rules.iter().map(|r| r.render(&plain.symbols)).collect();
        assert_eq!(rendered, ["START -> X_1 X_2", "X_1 -> 0", "X_2 -> 1"]);
    }

    #[test]
    fn all_first_setting_takes_first_alternatives() {
        let g = build_adversary_grammar(3);
        let plain = g.instantiate(&ParameterSetting::all_first(g.n())).unwrap();
        for (rule, group) in plain.rules.iter().zip(&g.groups) {
            assert_eq!(rule, &group.alternatives[0]);
        }
    }

    #[test]
    fn arity_violation_is_reported() {
        let mut g = build_adversary_grammar(3);
        g.groups[2].alternatives.pop();
        let report = g.validate();
        assert_eq!(
            report.violations,
            vec![Violation::GroupArity {
                group: 3,
                expected: 2,
                found: 1
            }]
        );
        assert!(report.to_string().starts_with("group arity"));
    }

    #[test]
    fn multi_symbol_lhs_is_cs_only() {
        let mut t = SymbolTable::new();
        let s = t.nonterminal("S");
        let c = t.nonterminal("C_0");
        let z = t.nonterminal("Z_0");
        let a = t.terminal("c_0");
        let groups = vec![
            ProductionGroup::padded(Production::new(vec![c, c], vec![c, z]), 2),
            ProductionGroup::padded(Production::unary(s, vec![c, c]), 2),
            ProductionGroup::padded(Production::unary(c, vec![a]), 2),
        ];
        let g = Ppcfg::new(t, groups, s, Mode::ContextSensitive);
        assert!(g.validate().is_ok());
        let report = g.validate_as(Mode::ContextFree);
        assert!(matches!(
            report.violations[..],
            [Violation::MultiSymbolLhsInCf { group: 1, .. }, ..]
        ));
    }

    #[test]
    fn setting_errors() {
        let g = build_adversary_grammar(2);
        assert_eq!(
            g.instantiate(&ParameterSetting::new(vec![1, 1])),
            Err(GrammarError::SettingLength { expected: 3, found: 2 })
        );
        assert_eq!(
            g.instantiate(&ParameterSetting::new(vec![1, 3, 1])),
            Err(GrammarError::ChoiceOutOfRange {
                group: 2,
                choice: 3,
                arity: 2
            })
        );
    }

    #[test]
    fn bits_round_trip() {
        let p = ParameterSetting::from_bits("0110").unwrap();
        assert_eq!(p.choices(), &[1, 2, 2, 1]);
        assert_eq!(p.to_bits().as_deref(), Some("0110"));
        assert!(ParameterSetting::from_bits("012").is_err());
    }

    #[test]
    fn family_of_duplicate_group_has_one_language() {
        let mut t = SymbolTable::new();
        let s = t.nonterminal("A");
        let a = t.terminal("a");
        let g = Ppcfg::new(
            t,
            vec![ProductionGroup::padded(Production::unary(s, vec![a]), 2)],
            s,
            Mode::ContextFree,
        );
        let fam = g.bounded_language_family(3, &budget()).unwrap();
        assert_eq!(fam.len(), 1);
    }

    #[test]
    fn adversary_family_has_two_to_the_n_singletons() {
        let g = build_adversary_grammar(3);
        let fam = g.bounded_language_family(3, &budget()).unwrap();
        assert_eq!(fam.len(), 8);
        assert!(fam
            .languages
            .iter()
            .all(|l| l.len() == 1 && l.iter().next().unwrap().len() == 3));
        assert!(fam.incomplete.is_empty());
    }
}
