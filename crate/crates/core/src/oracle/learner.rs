use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Hypothesis, OracleAnswer, OracleError, QueryKind, Teacher, Transcript};
use crate::engines::{self, DerivationBudget};
use crate::grammar::{ParameterSetting, Ppcfg, SettingIter};
use crate::symbol::Word;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Strategy {
    /// Equivalence-query every candidate in setting order.
    ExhaustiveEquivalence,
    /// Membership-probe a seeded random half of the candidates, then
    /// equivalence-query the survivors in a seeded random order.
    RandomMembershipThenEquivalence,
    /// Walk settings in Gray-code order, membership-probing words that split
    /// the surviving candidates; equivalence-query once one candidate is left.
    BitwiseProbe,
}

impl Strategy {
    pub const ALL: [Strategy; 3] = [
        Strategy::ExhaustiveEquivalence,
        Strategy::RandomMembershipThenEquivalence,
        Strategy::BitwiseProbe,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::ExhaustiveEquivalence => "exhaustive",
            Strategy::RandomMembershipThenEquivalence => "random",
            Strategy::BitwiseProbe => "bitwise",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "exhaustive" | "exhaustive-equivalence" => Ok(Strategy::ExhaustiveEquivalence),
            "random" | "random-membership-then-equivalence" => Ok(Strategy::RandomMembershipThenEquivalence),
            "bitwise" | "bitwise-probe" => Ok(Strategy::BitwiseProbe),
            _ => Err(format!(
                "unknown strategy `{s}` (expected exhaustive, random or bitwise)"
            )),
        }
    }
}

/// A setting together with its bounded language.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Candidate {
    pub setting: ParameterSetting,
    pub language: BTreeSet<Word>,
}

/// The learner's view of a family: one candidate per distinct bounded
/// language, keyed by the first choice setting (lexicographic) producing it.
#[derive(Debug, Clone)]
pub struct HypothesisSpace {
    pub family: Ppcfg,
    pub length_bound: usize,
    pub candidates: Vec<Candidate>,
}

impl HypothesisSpace {
    /// Enumerates every setting of the choice-bearing groups; padded groups
    /// stay at 1.
    pub fn from_family(family: Ppcfg, length_bound: usize, budget: &DerivationBudget) -> Result<Self, OracleError> {
        let report = family.validate();
        if !report.is_ok() {
            return Err(crate::grammar::GrammarError::Invalid(report).into());
        }
        let choice = family.choice_groups();
        let arities = choice.iter().map(|&g| family.groups[g].arity()).collect();
        let mut seen = HashSet::new();
        let mut candidates = Vec::new();
        for choices in SettingIter::new(arities) {
            let setting = family.expand_choice_setting(choices.choices())?;
            let plain = family.instantiate_unchecked(&setting);
            let language = engines::enumerate_language(&plain, length_bound, budget)?.words;
            if seen.insert(language.clone()) {
                candidates.push(Candidate { setting, language });
            }
        }
        Ok(HypothesisSpace {
            family,
            length_bound,
            candidates,
        })
    }

    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Total queries (repeats included) before the learner gives up.
    pub max_queries: usize,
    pub seed: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_queries: 1 << 16,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Identified(ParameterSetting),
    GaveUp,
}

struct Session<'a> {
    space: &'a HypothesisSpace,
    teacher: &'a mut dyn Teacher,
    transcript: Transcript,
    alive: Vec<bool>,
    asked: HashSet<Word>,
    max_queries: usize,
}

enum Step {
    Done(Outcome),
    Continue,
}

impl Session<'_> {
    fn remaining(&self) -> impl Iterator<Item = usize> + '_ {
        self.alive.iter().enumerate().filter(|(_, &a)| a).map(|(i, _)| i)
    }

    fn alive_count(&self) -> usize {
        self.alive.iter().filter(|&&a| a).count()
    }

    fn ask(&mut self, query: QueryKind) -> Result<Option<OracleAnswer>, OracleError> {
        if self.transcript.total() >= self.max_queries {
            return Ok(None);
        }
        let key = query.key(self.teacher.family())?;
        let answer = self.teacher.answer(&query)?;
        self.transcript.record(query, key, answer.clone());
        Ok(Some(answer))
    }

    fn membership(&mut self, w: Word) -> Result<Step, OracleError> {
        self.asked.insert(w.clone());
        let Some(answer) = self.ask(QueryKind::Membership(w.clone()))? else {
            return Ok(Step::Done(Outcome::GaveUp));
        };
        let keep_members = match answer {
            OracleAnswer::True => Some(true),
            OracleAnswer::False => Some(false),
            OracleAnswer::Unknown | OracleAnswer::Counterexample(_) => None,
        };
        if let Some(want) = keep_members {
            for (i, c) in self.space.candidates.iter().enumerate() {
                if c.language.contains(&w) != want {
                    self.alive[i] = false;
                }
            }
        }
        Ok(Step::Continue)
    }

    fn equivalence(&mut self, idx: usize) -> Result<Step, OracleError> {
        let hyp = &self.space.candidates[idx];
        let Some(answer) = self.ask(QueryKind::Equivalence(Hypothesis::Setting(hyp.setting.clone())))? else {
            return Ok(Step::Done(Outcome::GaveUp));
        };
        match answer {
            OracleAnswer::True => return Ok(Step::Done(Outcome::Identified(hyp.setting.clone()))),
            OracleAnswer::Counterexample(c) => {
                let in_hyp = hyp.language.contains(&c);
                for (i, cand) in self.space.candidates.iter().enumerate() {
                    if cand.language.contains(&c) == in_hyp {
                        self.alive[i] = false;
                    }
                }
            }
            OracleAnswer::False | OracleAnswer::Unknown => self.alive[idx] = false,
        }
        Ok(Step::Continue)
    }

    /// Shortlex-first word of candidate `idx` that some survivors contain and
    /// others do not, and that has not been asked yet.
    fn splitting_word(&self, idx: usize) -> Option<Word> {
        let table = &self.space.family.symbols;
        let alive: Vec<&Candidate> = self.remaining().map(|i| &self.space.candidates[i]).collect();
        let mut words: Vec<&Word> = self.space.candidates[idx].language.iter().collect();
        words.sort_by(|a, b| table.shortlex_cmp(a, b));
        words
            .into_iter()
            .find(|w| !self.asked.contains(*w) && alive.iter().any(|c| !c.language.contains(*w)))
            .cloned()
    }
}

macro_rules! step {
    ($e:expr) => {
        if let Step::Done(o) = $e? {
            return Ok(o);
        }
    };
}

/// Runs `strategy` against `teacher` until an equivalence query succeeds, the
/// candidates run out, or the query limit is reached.
pub fn run_learner(
    strategy: Strategy,
    space: &HypothesisSpace,
    teacher: &mut dyn Teacher,
    limits: Limits,
) -> Result<(Transcript, Outcome), OracleError> {
    let mut s = Session {
        space,
        teacher,
        transcript: Transcript::new(),
        alive: vec![true; space.len()],
        asked: HashSet::new(),
        max_queries: limits.max_queries,
    };
    let outcome = match strategy {
        Strategy::ExhaustiveEquivalence => exhaustive(&mut s),
        Strategy::RandomMembershipThenEquivalence => random_then_equivalence(&mut s, limits.seed),
        Strategy::BitwiseProbe => bitwise(&mut s),
    }?;
    Ok((s.transcript, outcome))
}

fn exhaustive(s: &mut Session<'_>) -> Result<Outcome, OracleError> {
    for idx in 0..s.space.len() {
        if s.alive[idx] {
            step!(s.equivalence(idx));
        }
    }
    Ok(Outcome::GaveUp)
}

fn random_then_equivalence(s: &mut Session<'_>, seed: u64) -> Result<Outcome, OracleError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..s.space.len()).collect();
    order.shuffle(&mut rng);
    for &idx in &order[..order.len() / 2] {
        let words: Vec<&Word> = s.space.candidates[idx]
            .language
            .iter()
            .filter(|w| !s.asked.contains(*w))
            .collect();
        if words.is_empty() {
            continue;
        }
        let w = words[rng.gen_range(0..words.len())].clone();
        step!(s.membership(w));
    }
    order.shuffle(&mut rng);
    for idx in order {
        if s.alive[idx] {
            step!(s.equivalence(idx));
        }
    }
    Ok(Outcome::GaveUp)
}

fn bitwise(s: &mut Session<'_>) -> Result<Outcome, OracleError> {
    let order = gray_order(s.space);
    loop {
        let alive = s.alive_count();
        if alive == 0 {
            return Ok(Outcome::GaveUp);
        }
        let first = s.remaining().next().expect("nonempty");
        if alive == 1 {
            step!(s.equivalence(first));
            continue;
        }
        let probe = order.iter().filter(|&&i| s.alive[i]).find_map(|&i| s.splitting_word(i));
        match probe {
            Some(w) => step!(s.membership(w)),
            None => step!(s.equivalence(first)),
        }
    }
}

/// Candidate indices sorted by the reflected mixed-radix Gray rank of their
/// choice vectors.
fn gray_order(space: &HypothesisSpace) -> Vec<usize> {
    let groups = space.family.choice_groups();
    let radices: Vec<usize> = groups.iter().map(|&g| space.family.groups[g].arity()).collect();
    let mut keyed: Vec<(Vec<usize>, usize)> = space
        .candidates
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let digits: Vec<usize> = groups.iter().map(|&g| c.setting.choices()[g] - 1).collect();
            (gray_rank(&digits, &radices), i)
        })
        .collect();
    keyed.sort();
    keyed.into_iter().map(|(_, i)| i).collect()
}

/// Position-wise rank in the reflected Gray sequence: a digit runs backwards
/// whenever the digits before it have odd sum.
fn gray_rank(digits: &[usize], radices: &[usize]) -> Vec<usize> {
    let mut reflected = false;
    digits
        .iter()
        .zip(radices)
        .map(|(&d, &r)| {
            let v = if reflected { r - 1 - d } else { d };
            if d % 2 == 1 {
                reflected = !reflected;
            }
            v
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{adversary_bound, build_adversary_grammar, AdversarialTeacher, AdversaryMode, HonestTeacher};

    fn space(n: usize) -> HypothesisSpace {
        HypothesisSpace::from_family(build_adversary_grammar(n), n, &DerivationBudget::default()).unwrap()
    }

    #[test]
    fn space_has_one_candidate_per_string() {
        assert_eq!(space(3).len(), 8);
    }

    #[test]
    fn exhaustive_against_literal_adversary_n3() {
        let sp = space(3);
        let mut t = AdversarialTeacher::new(3, AdversaryMode::Literal).unwrap();
        let (tr, out) = run_learner(Strategy::ExhaustiveEquivalence, &sp, &mut t, Limits::default()).unwrap();
        assert!(matches!(out, Outcome::Identified(_)));
        assert_eq!(tr.total(), 8);
        assert_eq!(tr.negatives_before_first_true(), 7);
    }

    #[test]
    fn every_strategy_needs_the_bound_against_sound_adversary() {
        let sp = space(4);
        for strategy in Strategy::ALL {
            let mut t = AdversarialTeacher::new(4, AdversaryMode::Sound).unwrap();
            let (tr, out) = run_learner(strategy, &sp, &mut t, Limits::default()).unwrap();
            let first = tr.first_true().expect("learner finishes");
            assert!(first.distinct_so_far as u64 > adversary_bound(4) - 1, "{strategy}");
            let Outcome::Identified(p) = out else {
                panic!("{strategy}")
            };
            let last = sp.candidates.iter().find(|c| c.setting == p).unwrap();
            assert_eq!(
                t.consistent().iter().collect::<Vec<_>>(),
                last.language.iter().collect::<Vec<_>>()
            );
        }
    }

    #[test]
    fn honest_teacher_is_identified() {
        let sp = space(6);
        let target = build_adversary_grammar(6)
            .expand_choice_setting(&[2, 1, 1, 2, 2, 1])
            .unwrap();
        for strategy in Strategy::ALL {
            let mut t =
                HonestTeacher::new(build_adversary_grammar(6), &target, 6, DerivationBudget::default()).unwrap();
            let (tr, out) = run_learner(strategy, &sp, &mut t, Limits::default()).unwrap();
            assert_eq!(out, Outcome::Identified(target.clone()));
            assert!(tr.entries().last().unwrap().answer.is_true());
        }
    }

    #[test]
    fn query_limit_gives_up() {
        let sp = space(3);
        let mut t = AdversarialTeacher::new(3, AdversaryMode::Sound).unwrap();
        let limits = Limits {
            max_queries: 3,
            seed: 0,
        };
        let (tr, out) = run_learner(Strategy::ExhaustiveEquivalence, &sp, &mut t, limits).unwrap();
        assert_eq!(out, Outcome::GaveUp);
        assert_eq!(tr.total(), 3);
    }

    #[test]
    fn gray_rank_changes_one_digit_between_neighbours() {
        let radices = [3, 2, 3];
        let mut all: Vec<(Vec<usize>, Vec<usize>)> = SettingIter::new(radices.to_vec())
            .map(|p| {
                let d: Vec<usize> = p.choices().iter().map(|c| c - 1).collect();
                (gray_rank(&d, &radices), d)
            })
            .collect();
        all.sort();
        for pair in all.windows(2) {
            let diff = pair[0].1.iter().zip(&pair[1].1).filter(|(a, b)| a != b).count();
            assert_eq!(diff, 1);
        }
    }

    #[test]
    fn strategy_names_parse() {
        for s in Strategy::ALL {
            assert_eq!(s.name().parse::<Strategy>().unwrap(), s);
        }
        assert!("nope".parse::<Strategy>().is_err());
    }
}
