use std::collections::{BTreeSet, HashSet};

use super::{adversary_bound, build_adversary_grammar, Hypothesis, OracleAnswer, OracleError, QueryKey, QueryKind};
use crate::engines::{self, brute_force_member, cyk_member, to_cnf, CnfGrammar, DerivationBudget, Verdict};
use crate::grammar::{ParameterSetting, PlainGrammar, Ppcfg};
use crate::symbol::{Symbol, SymbolTable, Word};

/// A source of oracle answers. Teachers carry mutable state and are not
/// meant to be shared between concurrent learners.
pub trait Teacher {
    fn answer(&mut self, query: &QueryKind) -> Result<OracleAnswer, OracleError>;

    /// Grammar that setting-valued hypotheses refer to.
    fn family(&self) -> &Ppcfg;
}

fn check_alphabet(table: &SymbolTable, w: &[Symbol]) -> Result<(), OracleError> {
    match w.iter().find(|&&s| !table.contains(s) || !table.is_terminal(s)) {
        Some(&s) if table.contains(s) => Err(OracleError::Alphabet(table.name(s).to_owned())),
        Some(&s) => Err(OracleError::Alphabet(format!("#{}", s.index()))),
        None => Ok(()),
    }
}

/// Answers truthfully for a fixed target setting, comparing languages up to
/// a length bound.
#[derive(Debug, Clone)]
pub struct HonestTeacher {
    family: Ppcfg,
    target: PlainGrammar,
    target_cnf: Option<CnfGrammar>,
    target_language: BTreeSet<Word>,
    length_bound: usize,
    budget: DerivationBudget,
}

impl HonestTeacher {
    pub fn new(
        family: Ppcfg,
        target: &ParameterSetting,
        length_bound: usize,
        budget: DerivationBudget,
    ) -> Result<Self, OracleError> {
        let plain = family.instantiate(target)?;
        let target_cnf = plain.is_context_free().then(|| to_cnf(&plain)).transpose()?;
        let target_language = engines::enumerate_language(&plain, length_bound, &budget)?.words;
        Ok(HonestTeacher {
            family,
            target: plain,
            target_cnf,
            target_language,
            length_bound,
            budget,
        })
    }

    pub fn target_language(&self) -> &BTreeSet<Word> {
        &self.target_language
    }

    pub fn membership(&self, w: &[Symbol]) -> Result<OracleAnswer, OracleError> {
        check_alphabet(&self.family.symbols, w)?;
        let verdict = match &self.target_cnf {
            Some(cnf) => {
                if cyk_member(cnf, w)? {
                    Verdict::Yes
                } else {
                    Verdict::No
                }
            }
            None => {
                let budget = DerivationBudget {
                    max_len: self.budget.max_len.max(w.len()),
                    ..self.budget
                };
                brute_force_member(&self.target, w, &budget)?.verdict
            }
        };
        Ok(match verdict {
            Verdict::Yes => OracleAnswer::True,
            Verdict::No => OracleAnswer::False,
            Verdict::Unknown => OracleAnswer::Unknown,
        })
    }

    /// `True` if the bounded languages coincide, else the shortlex-least word
    /// of their symmetric difference.
    pub fn equivalence(&self, h: &Hypothesis) -> Result<OracleAnswer, OracleError> {
        let plain = match h {
            Hypothesis::Setting(p) => self.family.instantiate(p)?,
            Hypothesis::Grammar(g) => g.clone(),
        };
        let hyp = engines::enumerate_language(&plain, self.length_bound, &self.budget)?.words;
        let table = &self.family.symbols;
        let diff = hyp
            .symmetric_difference(&self.target_language)
            .min_by(|a, b| table.shortlex_cmp(a, b));
        Ok(match diff {
            None => OracleAnswer::True,
            Some(w) => OracleAnswer::Counterexample(w.clone()),
        })
    }
}

impl Teacher for HonestTeacher {
    fn answer(&mut self, query: &QueryKind) -> Result<OracleAnswer, OracleError> {
        match query {
            QueryKind::Membership(w) => self.membership(w),
            QueryKind::Equivalence(h) => self.equivalence(h),
        }
    }

    fn family(&self) -> &Ppcfg {
        &self.family
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdversaryMode {
    /// Counts distinct queries and says `true` once `2^N - 1` have been asked,
    /// whatever they were.
    Literal,
    /// Tracks the settings still consistent with every answer and only says
    /// `true` when exactly one remains and the query names it.
    Sound,
}

/// Teacher for [`build_adversary_grammar`] that delays the first `true` for
/// as long as it can.
#[derive(Debug, Clone)]
pub struct AdversarialTeacher {
    family: Ppcfg,
    n: usize,
    mode: AdversaryMode,
    seen: HashSet<QueryKey>,
    distinct: u64,
    consistent: BTreeSet<Word>,
}

impl AdversarialTeacher {
    /// Largest supported adversary size.
    pub const MAX_N: usize = 20;

    pub fn new(n: usize, mode: AdversaryMode) -> Result<Self, OracleError> {
        if n == 0 || n > Self::MAX_N {
            return Err(OracleError::BadSize(n));
        }
        let family = build_adversary_grammar(n);
        let zero = family.symbols.get("0").expect("adversary alphabet");
        let one = family.symbols.get("1").expect("adversary alphabet");
        let consistent = (0..1u64 << n)
            .map(|bits| {
                (0..n)
                    .map(|i| if bits >> (n - 1 - i) & 1 == 1 { one } else { zero })
                    .collect()
            })
            .collect();
        Ok(AdversarialTeacher {
            family,
            n,
            mode,
            seen: HashSet::new(),
            distinct: 0,
            consistent,
        })
    }

    pub fn mode(&self) -> AdversaryMode {
        self.mode
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// The loop counter `i`: distinct queries seen so far.
    pub fn distinct_queries(&self) -> u64 {
        self.distinct
    }

    /// Target strings not yet ruled out by the answers given (sound mode).
    pub fn consistent(&self) -> &BTreeSet<Word> {
        &self.consistent
    }

    /// The one string a hypothesis derives, as the adversary family promises.
    fn hypothesis_word(&self, h: &Hypothesis) -> Result<Word, OracleError> {
        let plain = match h {
            Hypothesis::Setting(p) => self.family.instantiate(p)?,
            Hypothesis::Grammar(g) => g.clone(),
        };
        let lang = engines::enumerate_language(&plain, self.n, &DerivationBudget::default())?.words;
        let mut it = lang.into_iter();
        match (it.next(), it.next()) {
            (Some(w), None) if w.len() == self.n => {
                check_alphabet(&self.family.symbols, &w).map_err(|_| OracleError::OutsideFamily)?;
                Ok(w)
            }
            _ => Err(OracleError::OutsideFamily),
        }
    }

    fn answer_literal(&mut self, query: &QueryKind, key: QueryKey) -> Result<OracleAnswer, OracleError> {
        if self.distinct >= adversary_bound(self.n) {
            return Ok(OracleAnswer::True);
        }
        if self.seen.insert(key) {
            self.distinct += 1;
        }
        Ok(match query {
            QueryKind::Equivalence(h) => OracleAnswer::Counterexample(self.hypothesis_word(h)?),
            QueryKind::Membership(_) => OracleAnswer::False,
        })
    }

    fn answer_sound(&mut self, query: &QueryKind, key: QueryKey) -> Result<OracleAnswer, OracleError> {
        if self.seen.insert(key) {
            self.distinct += 1;
        }
        let only = |c: &BTreeSet<Word>, w: &Word| c.len() == 1 && c.contains(w);
        Ok(match query {
            QueryKind::Equivalence(h) => {
                let w = self.hypothesis_word(h)?;
                if only(&self.consistent, &w) {
                    OracleAnswer::True
                } else {
                    self.consistent.remove(&w);
                    OracleAnswer::Counterexample(w)
                }
            }
            QueryKind::Membership(w) => {
                if only(&self.consistent, w) {
                    OracleAnswer::True
                } else {
                    self.consistent.remove(w);
                    OracleAnswer::False
                }
            }
        })
    }
}

impl Teacher for AdversarialTeacher {
    fn answer(&mut self, query: &QueryKind) -> Result<OracleAnswer, OracleError> {
        if let QueryKind::Membership(w) = query {
            check_alphabet(&self.family.symbols, w)?;
        }
        let key = query.key(&self.family)?;
        match self.mode {
            AdversaryMode::Literal => self.answer_literal(query, key),
            AdversaryMode::Sound => self.answer_sound(query, key),
        }
    }

    fn family(&self) -> &Ppcfg {
        &self.family
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn word(t: &AdversarialTeacher, bits: &str) -> Word {
        let spaced: Vec<String> = bits.chars().map(String::from).collect();
        t.family().symbols.parse_word(&spaced.join(" ")).unwrap()
    }

    fn setting(bits: &str) -> Hypothesis {
        Hypothesis::Setting(ParameterSetting::from_bits(&format!("0{bits}")).unwrap())
    }

    #[test]
    fn literal_mode_says_true_after_bound_distinct_queries() {
        let mut t = AdversarialTeacher::new(3, AdversaryMode::Literal).unwrap();
        let mut falses = 0;
        for bits in ["000", "001", "010", "011", "100", "101", "110"] {
            let a = t.answer(&QueryKind::Equivalence(setting(bits))).unwrap();
            assert_eq!(a, OracleAnswer::Counterexample(word(&t, bits)));
            falses += 1;
        }
        assert_eq!(falses, 7);
        assert!(t.answer(&QueryKind::Equivalence(setting("111"))).unwrap().is_true());
    }

    #[test]
    fn repeated_query_does_not_advance_counter() {
        let mut t = AdversarialTeacher::new(2, AdversaryMode::Literal).unwrap();
        let q = QueryKind::Membership(word(&t, "01"));
        assert_eq!(t.answer(&q).unwrap(), OracleAnswer::False);
        assert_eq!(t.answer(&q).unwrap(), OracleAnswer::False);
        assert_eq!(t.distinct_queries(), 1);
    }

    #[test]
    fn padded_start_choice_is_the_same_hypothesis() {
        let mut t = AdversarialTeacher::new(2, AdversaryMode::Literal).unwrap();
        t.answer(&QueryKind::Equivalence(Hypothesis::Setting(ParameterSetting::new(
            vec![1, 1, 2],
        ))))
        .unwrap();
        t.answer(&QueryKind::Equivalence(Hypothesis::Setting(ParameterSetting::new(
            vec![2, 1, 2],
        ))))
        .unwrap();
        assert_eq!(t.distinct_queries(), 1);
    }

    #[test]
    fn sound_mode_membership_eliminates_one_setting() {
        let mut t = AdversarialTeacher::new(3, AdversaryMode::Sound).unwrap();
        let w = word(&t, "000");
        assert_eq!(
            t.answer(&QueryKind::Membership(w.clone())).unwrap(),
            OracleAnswer::False
        );
        assert_eq!(t.consistent().len(), 7);
        assert!(!t.consistent().contains(&w));
    }

    #[test]
    fn sound_mode_answers_true_only_for_last_candidate() {
        let mut t = AdversarialTeacher::new(1, AdversaryMode::Sound).unwrap();
        assert!(!t.answer(&QueryKind::Equivalence(setting("1"))).unwrap().is_true());
        assert!(!t.answer(&QueryKind::Equivalence(setting("1"))).unwrap().is_true());
        assert!(t.answer(&QueryKind::Equivalence(setting("0"))).unwrap().is_true());
    }

    #[test]
    fn wrong_alphabet_is_an_error() {
        let mut t = AdversarialTeacher::new(2, AdversaryMode::Sound).unwrap();
        let start = t.family().start;
        assert!(matches!(
            t.answer(&QueryKind::Membership(vec![start])),
            Err(OracleError::Alphabet(_))
        ));
    }

    #[test]
    fn honest_counterexample_is_shortlex_least() {
        let family = build_adversary_grammar(2);
        let teacher = HonestTeacher::new(
            family.clone(),
            &ParameterSetting::new(vec![1, 1, 2]),
            2,
            DerivationBudget::default(),
        )
        .unwrap();
        let h = Hypothesis::Setting(ParameterSetting::new(vec![1, 2, 1]));
        let OracleAnswer::Counterexample(w) = teacher.equivalence(&h).unwrap() else {
            panic!()
        };
        assert_eq!(family.symbols.render(&w), "0 1");
        let same = Hypothesis::Setting(ParameterSetting::new(vec![2, 1, 2]));
        assert!(teacher.equivalence(&same).unwrap().is_true());
        let w01 = family.symbols.parse_word("0 1").unwrap();
        let w00 = family.symbols.parse_word("0 0").unwrap();
        assert_eq!(teacher.membership(&w01).unwrap(), OracleAnswer::True);
        assert_eq!(teacher.membership(&w00).unwrap(), OracleAnswer::False);
    }
}
