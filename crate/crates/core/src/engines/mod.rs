//! Membership engines.
//!
//! Context-free grammars have two independent deciders: [`to_cnf`] +
//! [`cyk_member`], and the span chart behind [`brute_force_member`], which
//! works on the rules as written. The sentential-form search in [`derive`] is
//! the engine for context-sensitive rewriting grammars, where its answers are
//! relative to a [`DerivationBudget`].

mod chart;
mod cnf;
mod enumerate;
mod search;

pub use cnf::{cyk_member, nonterminal_member, to_cnf, CnfGrammar};
pub use enumerate::{enumerate_language, BoundedLanguage};
pub use search::{
    brute_force_member, cf_completeness_bound, derive, derive_with, Derivation, DerivationStep, MembershipAnswer,
    Potential, SearchHints, Verdict,
};

use crate::grammar::{GrammarError, PlainGrammar};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EngineError {
    #[error("grammar is not context-free")]
    NotContextFree,
    #[error("unknown terminal `{0}`")]
    UnknownTerminal(String),
    #[error("unknown nonterminal `{0}`")]
    UnknownNonterminal(String),
    #[error("derivation budget must be positive (max_len={max_len}, max_forms={max_forms})")]
    InvalidBudget { max_len: usize, max_forms: usize },
    #[error("potential increases across rule `{0}`")]
    PotentialNotMonotone(String),
    #[error(transparent)]
    Grammar(#[from] GrammarError),
}

/// Limits for sentential-form search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DerivationBudget {
    /// Longest sentential form kept on the frontier.
    pub max_len: usize,
    /// Cap on distinct sentential forms visited.
    pub max_forms: usize,
}

impl DerivationBudget {
    pub const DEFAULT_MAX_FORMS: usize = 1_000_000;

    pub fn new(max_len: usize, max_forms: usize) -> Result<Self, EngineError> {
        if max_len == 0 || max_forms == 0 {
            return Err(EngineError::InvalidBudget { max_len, max_forms });
        }
        Ok(DerivationBudget { max_len, max_forms })
    }

    /// Generic default for a target word: forms up to `2|w| + 8` symbols.
    pub fn for_word_len(len: usize) -> Self {
        DerivationBudget {
            max_len: 2 * len + 8,
            max_forms: Self::DEFAULT_MAX_FORMS,
        }
    }
}

impl Default for DerivationBudget {
    fn default() -> Self {
        DerivationBudget {
            max_len: 32,
            max_forms: Self::DEFAULT_MAX_FORMS,
        }
    }
}

pub(crate) fn ensure_valid(g: &PlainGrammar) -> Result<(), EngineError> {
    let report = g.validate();
    if report.is_ok() {
        Ok(())
    } else {
        Err(EngineError::Grammar(GrammarError::Invalid(report)))
    }
}
