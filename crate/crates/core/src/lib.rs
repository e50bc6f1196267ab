//! Principled parametric grammars: construction, normalization transforms,
//! membership engines, query oracles, and the SAT and factoring encodings.
//!
//! A [`Ppcfg`] holds `n` ordered production groups; a [`ParameterSetting`]
//! picks one alternative from each and [`Ppcfg::instantiate`] yields the
//! plain grammar `Γ_p`. Context-sensitive grammars share the same types with
//! [`Mode::ContextSensitive`] and multi-symbol left-hand sides.

pub mod engines;
pub mod grammar;
pub mod oracle;
pub mod reductions;
pub mod sample;
pub mod symbol;
pub mod text;
pub mod transforms;

pub use engines::{DerivationBudget, EngineError, MembershipAnswer, Verdict};
pub use grammar::{
    BoundedLanguageSet, GrammarError, Mode, ParameterSetting, PlainGrammar, Ppcfg, Production, ProductionGroup,
    SettingIter, ValidationReport, Violation,
};
pub use symbol::{Symbol, SymbolKind, SymbolTable, Word, EPSILON_TOKEN};
