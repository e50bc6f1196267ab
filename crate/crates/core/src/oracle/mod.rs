//! Query oracles, the adversarial teacher, and a learner harness that counts
//! queries.
//!
//! A learner talks to a [`Teacher`] through equivalence and membership
//! queries; every exchange lands in a [`Transcript`], which also tracks how
//! many *distinct* queries were asked. The adversary family built by
//! [`build_adversary_grammar`] has `2^N` settings that each derive a single
//! length-`N` bit string, so every answer can rule out at most one candidate.

mod learner;
mod teacher;
mod transcript;

pub use learner::{run_learner, Candidate, HypothesisSpace, Limits, Outcome, Strategy};
pub use teacher::{AdversarialTeacher, AdversaryMode, HonestTeacher, Teacher};
pub use transcript::{Transcript, TranscriptEntry};

use crate::engines::EngineError;
use crate::grammar::{GrammarError, Mode, ParameterSetting, PlainGrammar, Ppcfg, Production, ProductionGroup};
use crate::symbol::{SymbolTable, Word};

/// `START -> X_1 .. X_N` (padded to two identical alternatives) plus one
/// group `(X_k -> 0 | X_k -> 1)` per position.
pub fn build_adversary_grammar(n: usize) -> Ppcfg {
    let mut t = SymbolTable::new();
    let start = t.nonterminal("START");
    let xs: Vec<_> = (1..=n).map(|k| t.nonterminal(&format!("X_{k}"))).collect();
    let zero = t.terminal("0");
    let one = t.terminal("1");
    let mut groups = vec![ProductionGroup::padded(Production::unary(start, xs.clone()), 2)];
    groups.extend(
        xs.iter()
            .map(|&x| ProductionGroup::new(vec![Production::unary(x, vec![zero]), Production::unary(x, vec![one])])),
    );
    Ppcfg::new(t, groups, start, Mode::ContextFree)
}

/// Number of queries the adversary forces: `2^N - 1`.
pub fn adversary_bound(n: usize) -> u64 {
    (1u64 << n) - 1
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Hypothesis {
    /// A setting of the family grammar the teacher was built over.
    Setting(ParameterSetting),
    Grammar(PlainGrammar),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QueryKind {
    Equivalence(Hypothesis),
    Membership(Word),
}

/// Identity of a query for "has this been asked before": equivalence queries
/// are keyed by the instantiated rule list, membership queries by the word.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum QueryKey {
    Equivalence(Vec<Production>),
    Membership(Word),
}

impl QueryKind {
    pub fn key(&self, family: &Ppcfg) -> Result<QueryKey, OracleError> {
        Ok(match self {
            QueryKind::Membership(w) => QueryKey::Membership(w.clone()),
            QueryKind::Equivalence(Hypothesis::Setting(p)) => QueryKey::Equivalence(family.instantiate(p)?.rules),
            QueryKind::Equivalence(Hypothesis::Grammar(g)) => QueryKey::Equivalence(g.rules.clone()),
        })
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            QueryKind::Equivalence(_) => "equivalence",
            QueryKind::Membership(_) => "membership",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleAnswer {
    /// Equivalent, or a member.
    True,
    /// Not a member.
    False,
    /// Not equivalent; the word lies in the symmetric difference.
    Counterexample(Word),
    /// Membership could not be decided within the derivation budget.
    Unknown,
}

impl OracleAnswer {
    pub fn is_true(&self) -> bool {
        matches!(self, OracleAnswer::True)
    }

    pub fn render(&self, table: &SymbolTable) -> String {
        match self {
            OracleAnswer::True => "true".into(),
            OracleAnswer::False => "false".into(),
            OracleAnswer::Unknown => "unknown".into(),
            OracleAnswer::Counterexample(w) => format!("false counterexample={}", table.render(w)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("word uses symbol `{0}` outside the terminal alphabet")]
    Alphabet(String),
    #[error("hypothesis is not a single-string language of the adversary family")]
    OutsideFamily,
    #[error("adversary size {0} is out of range")]
    BadSize(usize),
    #[error(transparent)]
    Grammar(#[from] GrammarError),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engines::DerivationBudget;

    #[test]
    fn adversary_grammar_shape() {
        let g = build_adversary_grammar(1);
        assert_eq!(g.n(), 2);
        assert_eq!(g.k(), Some(2));
        assert_eq!(g.choice_groups(), vec![1]);
        let fam = g.bounded_language_family(1, &DerivationBudget::default()).unwrap();
        assert_eq!(fam.len(), 2);
    }

    #[test]
    fn setting_selects_bit_string() {
        let g = build_adversary_grammar(2);
        let plain = g.instantiate(&ParameterSetting::new(vec![1, 1, 2])).unwrap();
        let lang = crate::engines::enumerate_language(&plain, 2, &DerivationBudget::default()).unwrap();
        let words: Vec<_> = lang.words.iter().map(|w| plain.symbols.render(w)).collect();
        assert_eq!(words, ["0 1"]);
    }

    #[test]
    fn bound_values() {
        assert_eq!(adversary_bound(1), 1);
        assert_eq!(adversary_bound(3), 7);
        assert_eq!(adversary_bound(10), 1023);
    }
}
