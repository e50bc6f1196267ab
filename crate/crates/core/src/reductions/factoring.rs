//! Integer factoring as PPCSG learning. The bit groups of a setting spell a
//! number `P`; `Γ_{s_P}` derives a unary block of `P` counters per `S`
//! expansion and collapses counters pairwise into binary digits, so the
//! target string (the binary digits of `N`) is derivable iff `P | N`.

use crate::engines::{
    derive, derive_with, DerivationBudget, EngineError, MembershipAnswer, Potential, SearchHints, Verdict,
};
use crate::grammar::{GrammarError, Mode, ParameterSetting, Ppcfg, Production, ProductionGroup};
use crate::symbol::{Symbol, SymbolTable, Word};

/// Largest `N` whose factors [`factor_via_ppcsg`] confirms by derivation search.
pub const DERIVATION_CHECK_LIMIT: u64 = 24;

/// How adjacent counters `C_k C_k` are merged into `C_{k+1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CollapseGadget {
    /// `C_k C_k -> C_k Z_k`, `C_k Z_k -> C_{k+1}`. Every rule preserves the
    /// numeric value of a form, with `C_k`, `Z_k`, `c_k` worth `2^k`.
    #[default]
    ValuePreserving,
    /// `C_k C_k -> C_k Z_k`, `C_k Z_k -> C_{k+1} Z_k`, `C_{k+1} Z_k -> C_{k+1}`.
    /// The last rule deletes value: `C_k C_k C_k =>* C_{k+1}`.
    Lossy,
}

impl CollapseGadget {
    pub fn name(self) -> &'static str {
        match self {
            CollapseGadget::ValuePreserving => "value-preserving",
            CollapseGadget::Lossy => "lossy",
        }
    }
}

impl std::str::FromStr for CollapseGadget {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "value-preserving" => Ok(CollapseGadget::ValuePreserving),
            "lossy" => Ok(CollapseGadget::Lossy),
            _ => Err(format!("unknown gadget `{s}` (expected value-preserving or lossy)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FactoringError {
    #[error("N must be at least 1")]
    ZeroN,
    #[error("P must be at least 1")]
    ZeroDivisor,
    #[error("P = {p} outside the encodable range 1..={max}")]
    OutOfRange { p: u64, max: u64 },
    #[error("derivation search disagrees with divisibility for N = {n}, P = {p}: {verdict}")]
    Disagreement { n: u64, p: u64, verdict: &'static str },
    #[error(transparent)]
    Grammar(#[from] GrammarError),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

/// Highest `A` index: the bit length of `ceil(sqrt N)` minus one.
pub fn a_top(n: u64) -> usize {
    let r = ceil_sqrt(n);
    (u64::BITS - r.leading_zeros()).saturating_sub(1) as usize
}

/// Highest `B`, `C`, `Z` and `c` index: `ceil(lg N)`.
pub fn digit_top(n: u64) -> usize {
    if n <= 1 {
        0
    } else {
        (u64::BITS - (n - 1).leading_zeros()) as usize
    }
}

fn ceil_sqrt(n: u64) -> u64 {
    let r = n.isqrt();
    if r * r == n {
        r
    } else {
        r + 1
    }
}

/// The string `c_{i_m} .. c_{i_1}` over the set bits `i_m > .. > i_1` of `N`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TargetString {
    pub indices: Vec<usize>,
}

impl TargetString {
    pub fn word(&self, table: &SymbolTable) -> Option<Word> {
        self.indices.iter().map(|i| table.get(&format!("c_{i}"))).collect()
    }

    pub fn render(&self) -> String {
        self.indices
            .iter()
            .map(|i| format!("c_{i}"))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

pub fn target_string(n: u64) -> TargetString {
    TargetString {
        indices: (0..u64::BITS as usize).rev().filter(|&i| n >> i & 1 == 1).collect(),
    }
}

/// `P | N`, the arithmetic stand-in for membership of the target string.
pub fn divisor_membership(n: u64, p: u64) -> Result<bool, FactoringError> {
    if p == 0 {
        return Err(FactoringError::ZeroDivisor);
    }
    Ok(n % p == 0)
}

#[derive(Debug, Clone)]
pub struct FactoringReduction {
    pub n: u64,
    pub gadget: CollapseGadget,
    pub grammar: Ppcfg,
    /// `bit_groups[j]` is the group choosing how `A_j` expands.
    pub bit_groups: Vec<usize>,
    pub target: TargetString,
    pub target_word: Word,
}

pub fn factoring_to_ppcsg(n: u64) -> Result<FactoringReduction, FactoringError> {
    factoring_to_ppcsg_with(n, CollapseGadget::default())
}

/// Groups, in order: `S -> A_t S`; `S -> ε`; `A_0 -> B_0 | A_0 -> ε`;
/// `A_j -> A_{j-1} | A_j -> B_j A_{j-1}` for `j` in `1..=t`;
/// `B_j -> B_{j-1} B_{j-1}` for `j` in `1..=t`; `B_0 -> C_0`; per `k` the
/// collapse rules; `C_k -> c_k`. Single-rule groups are padded to two copies.
pub fn factoring_to_ppcsg_with(n: u64, gadget: CollapseGadget) -> Result<FactoringReduction, FactoringError> {
    if n == 0 {
        return Err(FactoringError::ZeroN);
    }
    let t = a_top(n);
    let l = digit_top(n);
    let mut tab = SymbolTable::new();
    let s = tab.nonterminal("S");
    let family = |tab: &mut SymbolTable, prefix: &str, top: usize| -> Vec<Symbol> {
        (0..=top).map(|i| tab.nonterminal(&format!("{prefix}_{i}"))).collect()
    };
    let a = family(&mut tab, "A", t);
    let b = family(&mut tab, "B", l);
    let c = family(&mut tab, "C", l);
    let z = family(&mut tab, "Z", l);
    let term: Vec<_> = (0..=l).map(|i| tab.terminal(&format!("c_{i}"))).collect();

    let one = |lhs: Vec<Symbol>, rhs: Vec<Symbol>| ProductionGroup::padded(Production::new(lhs, rhs), 2);
    let mut groups = vec![one(vec![s], vec![a[t], s]), one(vec![s], vec![])];
    let mut bit_groups = vec![groups.len()];
    groups.push(ProductionGroup::new(vec![
        Production::unary(a[0], vec![b[0]]),
        Production::unary(a[0], vec![]),
    ]));
    for j in 1..=t {
        bit_groups.push(groups.len());
        groups.push(ProductionGroup::new(vec![
            Production::unary(a[j], vec![a[j - 1]]),
            Production::unary(a[j], vec![b[j], a[j - 1]]),
        ]));
    }
    for j in 1..=t {
        groups.push(one(vec![b[j]], vec![b[j - 1], b[j - 1]]));
    }
    groups.push(one(vec![b[0]], vec![c[0]]));
    for k in 0..=l {
        groups.push(one(vec![c[k], c[k]], vec![c[k], z[k]]));
        if k < l {
            match gadget {
                CollapseGadget::ValuePreserving => groups.push(one(vec![c[k], z[k]], vec![c[k + 1]])),
                CollapseGadget::Lossy => {
                    groups.push(one(vec![c[k], z[k]], vec![c[k + 1], z[k]]));
                    groups.push(one(vec![c[k + 1], z[k]], vec![c[k + 1]]));
                }
            }
        }
    }
    for k in 0..=l {
        groups.push(one(vec![c[k]], vec![term[k]]));
    }
    let target = target_string(n);
    let target_word = target.word(&tab).expect("every set bit of N is at most ceil(lg N)");
    Ok(FactoringReduction {
        n,
        gadget,
        grammar: Ppcfg::new(tab, groups, s, Mode::ContextSensitive),
        bit_groups,
        target,
        target_word,
    })
}

impl FactoringReduction {
    /// Largest encodable `P`: all `t + 1` bits set.
    pub fn max_p(&self) -> u64 {
        (1u64 << self.bit_groups.len()) - 1
    }

    /// Bit `j` of `P` selects the branch of `A_j` that emits `B_j`; every
    /// other group is set to 1.
    pub fn number_to_setting(&self, p: u64) -> Result<ParameterSetting, FactoringError> {
        if p == 0 || p > self.max_p() {
            return Err(FactoringError::OutOfRange { p, max: self.max_p() });
        }
        let mut choices = vec![1; self.grammar.n()];
        for (j, &g) in self.bit_groups.iter().enumerate() {
            let bit = p >> j & 1 == 1;
            // A_0 lists its B_0 branch first, every other A_j second
            choices[g] = if bit == (j == 0) { 1 } else { 2 };
        }
        Ok(ParameterSetting::new(choices))
    }

    pub fn setting_to_number(&self, setting: &ParameterSetting) -> Result<u64, FactoringError> {
        self.grammar.check_setting(setting)?;
        Ok(self.bit_groups.iter().enumerate().fold(0, |acc, (j, &g)| {
            let c = setting.choices()[g];
            let bit = if j == 0 { c == 1 } else { c == 2 };
            acc | (bit as u64) << j
        }))
    }

    /// Symbol weights under which every rule of `Γ_{s_P}` preserves or raises
    /// value, and the target string weighs exactly `N`.
    pub fn potential(&self, p: u64) -> Potential {
        let tab = &self.grammar.symbols;
        let mut pot = Potential::zero(tab);
        for sym in tab.symbols() {
            let name = tab.name(sym);
            let Some((family, idx)) = name.split_once('_') else {
                continue;
            };
            let Ok(idx) = idx.parse::<u32>() else { continue };
            let w = match family {
                "A" => p % (1u64 << (idx + 1)),
                "B" | "C" | "Z" | "c" => 1u64 << idx,
                _ => continue,
            };
            pot.set(sym, w);
        }
        pot
    }

    /// Budget used for the derivation check: forms up to `N + 4`, `10^6` forms.
    pub fn default_budget(&self) -> DerivationBudget {
        DerivationBudget::new(self.n as usize + 4, DerivationBudget::DEFAULT_MAX_FORMS).expect("positive")
    }

    /// Searches for `S =>* w` in `Γ_{s_P}`. Under the value-preserving gadget
    /// the search also drops forms that break [`Alignment`].
    pub fn derivation_check(&self, p: u64, budget: &DerivationBudget) -> Result<MembershipAnswer, FactoringError> {
        let setting = self.number_to_setting(p)?;
        let plain = self.grammar.instantiate(&setting)?;
        if self.gadget == CollapseGadget::Lossy {
            return Ok(derive(&plain, &[plain.start], &self.target_word, budget, None)?);
        }
        let pot = self.potential(p);
        let align = Alignment::new(self, &pot);
        let dead = |form: &[Symbol]| !align.admits(form);
        let hints = SearchHints {
            potential: Some(&pot),
            dead_form: Some(&dead),
        };
        Ok(derive_with(&plain, &[plain.start], &self.target_word, budget, hints)?)
    }

    /// [`FactoringReduction::derivation_check`] with only the grammar-agnostic
    /// prunings (and the potential, for the value-preserving gadget).
    pub fn derivation_check_generic(
        &self,
        p: u64,
        budget: &DerivationBudget,
    ) -> Result<MembershipAnswer, FactoringError> {
        let setting = self.number_to_setting(p)?;
        let plain = self.grammar.instantiate(&setting)?;
        let pot = (self.gadget == CollapseGadget::ValuePreserving).then(|| self.potential(p));
        Ok(derive(&plain, &[plain.start], &self.target_word, budget, pot.as_ref())?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Piece {
    Counter,
    RightHalf,
    Terminal,
}

/// Dead-form test for the value-preserving gadget.
///
/// Weigh `C_k`, `Z_k`, `c_k` as `2^k` units. Only `S -> A_t S` raises the
/// total and `S` stays rightmost, so every symbol left of `S` keeps its unit
/// offset for the rest of the derivation. `C_k`, `Z_k` and `c_k` are never
/// split; they merge only with an adjacent piece of the same size. In the
/// target each `c_i` owns a block of `2^i` units, built by a binary merge
/// tree, so a piece of size `2^k` must sit inside one block at an offset
/// divisible by `2^k`; a `Z_k` is always a right half (odd multiple); and a
/// `c_k` must fill its block exactly.
struct Alignment<'a> {
    pot: &'a Potential,
    pieces: Vec<Option<Piece>>,
    stop: Option<Symbol>,
    blocks: Vec<(u64, u64)>,
}

impl<'a> Alignment<'a> {
    fn new(r: &FactoringReduction, pot: &'a Potential) -> Self {
        let tab = &r.grammar.symbols;
        let pieces = tab
            .symbols()
            .map(|s| match tab.name(s).split_once('_') {
                Some(("C", _)) => Some(Piece::Counter),
                Some(("Z", _)) => Some(Piece::RightHalf),
                Some(("c", _)) => Some(Piece::Terminal),
                _ => None,
            })
            .collect();
        let mut blocks = Vec::new();
        let mut start = 0;
        for &i in &r.target.indices {
            blocks.push((start, 1u64 << i));
            start += 1u64 << i;
        }
        Alignment {
            pot,
            pieces,
            stop: tab.get("S"),
            blocks,
        }
    }

    fn admits(&self, form: &[Symbol]) -> bool {
        let mut offset = 0u64;
        for &s in form {
            if Some(s) == self.stop {
                return true;
            }
            let size = self.pot.weight_of(s);
            if let Some(piece) = self.pieces[s.index()] {
                let Some(&(start, len)) = self.blocks.iter().find(|(b, l)| (*b..b + l).contains(&offset)) else {
                    return false;
                };
                let rel = offset - start;
                let fits = rel % size == 0 && rel + size <= len;
                let shaped = match piece {
                    Piece::Counter => true,
                    Piece::RightHalf => (rel / size) % 2 == 1,
                    Piece::Terminal => size == len,
                };
                if !fits || !shaped {
                    return false;
                }
            }
            offset += size;
        }
        true
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FactorOutcome {
    Factors { p: u64, q: u64 },
    PrimeOrUnit,
}

/// Smallest `P >= 2` whose setting admits the target string, by divisibility.
/// For `N` up to [`DERIVATION_CHECK_LIMIT`] the winning setting is also run
/// through the derivation search, which must answer yes.
pub fn factor_via_ppcsg(n: u64) -> Result<FactorOutcome, FactoringError> {
    if n == 0 {
        return Err(FactoringError::ZeroN);
    }
    let reduction = factoring_to_ppcsg(n)?;
    let limit = n.isqrt().min(reduction.max_p());
    for p in 2..=limit {
        if divisor_membership(n, p)? {
            if n <= DERIVATION_CHECK_LIMIT {
                let ans = reduction.derivation_check(p, &reduction.default_budget())?;
                if ans.verdict != Verdict::Yes {
                    return Err(FactoringError::Disagreement {
                        n,
                        p,
                        verdict: ans.verdict.as_str(),
                    });
                }
            }
            return Ok(FactorOutcome::Factors { p, q: n / p });
        }
    }
    Ok(FactorOutcome::PrimeOrUnit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engines::nonterminal_member;

    fn names(r: &FactoringReduction, prefix: &str) -> Vec<String> {
        let t = &r.grammar.symbols;
        t.nonterminals()
            .map(|s| t.name(s).to_owned())
            .filter(|n| n.starts_with(prefix))
            .collect()
    }

    #[test]
    fn index_ranges() {
        let r = factoring_to_ppcsg(15).unwrap();
        assert_eq!(names(&r, "A_"), ["A_0", "A_1", "A_2"]);
        assert_eq!(names(&r, "B_").len(), 5);
        assert_eq!(names(&r, "Z_").len(), 5);
        assert_eq!(a_top(4), 1);
        assert_eq!(digit_top(15), 4);
        assert_eq!(digit_top(16), 4);
        assert_eq!(digit_top(17), 5);
    }

    #[test]
    fn validates_only_as_context_sensitive() {
        let r = factoring_to_ppcsg(15).unwrap();
        assert!(r.grammar.validate().is_ok());
        let cf = r.grammar.validate_as(Mode::ContextFree);
        assert!(cf.to_string().contains("multi-symbol lhs in CF mode"));
    }

    #[test]
    fn bit_groups_are_the_only_choice_groups() {
        for n in [4, 15, 24, 100] {
            let r = factoring_to_ppcsg(n).unwrap();
            assert_eq!(r.grammar.choice_groups(), r.bit_groups);
        }
    }

    #[test]
    fn target_strings() {
        assert_eq!(target_string(6).render(), "c_2 c_1");
        assert_eq!(target_string(1).render(), "c_0");
        assert_eq!(target_string(15).render(), "c_3 c_2 c_1 c_0");
    }

    #[test]
    fn setting_number_round_trip() {
        let r = factoring_to_ppcsg(15).unwrap();
        for p in 1..=r.max_p() {
            assert_eq!(r.setting_to_number(&r.number_to_setting(p).unwrap()).unwrap(), p);
        }
        let s3 = r.number_to_setting(3).unwrap();
        let bits: Vec<usize> = r.bit_groups.iter().map(|&g| s3.choices()[g]).collect();
        assert_eq!(bits, [1, 2, 1]);
        assert!(r.number_to_setting(0).is_err());
        assert!(r.number_to_setting(r.max_p() + 1).is_err());
    }

    #[test]
    fn every_p_up_to_sqrt_n_is_encodable() {
        for n in 1..2000u64 {
            let r = factoring_to_ppcsg(n).unwrap();
            assert!(r.max_p() >= ceil_sqrt(n), "N = {n}");
        }
    }

    #[test]
    fn divisor_examples() {
        assert!(divisor_membership(15, 3).unwrap());
        assert!(!divisor_membership(15, 4).unwrap());
        assert_eq!(divisor_membership(15, 0), Err(FactoringError::ZeroDivisor));
    }

    #[test]
    fn potential_is_monotone_for_every_setting() {
        let r = factoring_to_ppcsg(24).unwrap();
        for p in 1..=r.max_p() {
            let plain = r.grammar.instantiate(&r.number_to_setting(p).unwrap()).unwrap();
            r.potential(p).check_monotone(&plain).unwrap();
            assert_eq!(r.potential(p).weight(&r.target_word), 24);
        }
    }

    #[test]
    fn six_matches_divisibility() {
        let r = factoring_to_ppcsg(6).unwrap();
        for p in 1..=r.max_p().min(6) {
            let ans = r.derivation_check(p, &r.default_budget()).unwrap();
            let expected = if 6 % p == 0 { Verdict::Yes } else { Verdict::No };
            assert_eq!(ans.verdict, expected, "P = {p}");
            if let Some(w) = ans.witness {
                let plain = r.grammar.instantiate(&r.number_to_setting(p).unwrap()).unwrap();
                assert!(w.replay(&plain.rules));
                assert_eq!(w.result(), &r.target_word[..]);
            }
        }
    }

    #[test]
    fn lossy_gadget_loses_value() {
        let r = factoring_to_ppcsg_with(5, CollapseGadget::Lossy).unwrap();
        let ans = r
            .derivation_check(2, &DerivationBudget::new(12, 1_000_000).unwrap())
            .unwrap();
        assert_eq!(ans.verdict, Verdict::Yes);
        assert!(!divisor_membership(5, 2).unwrap());
    }

    #[test]
    fn rooted_collapse_from_b1() {
        let r = factoring_to_ppcsg(6).unwrap();
        let plain = r.grammar.instantiate(&r.number_to_setting(2).unwrap()).unwrap();
        let b1 = plain.symbols.get("B_1").unwrap();
        let c1 = plain.symbols.parse_word("c_1").unwrap();
        let ans = derive(&plain, &[b1], &c1, &DerivationBudget::new(6, 10_000).unwrap(), None).unwrap();
        assert_eq!(ans.verdict, Verdict::Yes);
        let c0c0 = plain.symbols.parse_word("c_0 c_0").unwrap();
        let ans = derive(&plain, &[b1], &c0c0, &DerivationBudget::new(6, 10_000).unwrap(), None).unwrap();
        assert_eq!(ans.verdict, Verdict::Yes);
        assert!(nonterminal_member(&plain, b1, &c1).is_err());
    }

    #[test]
    fn factor_examples() {
        assert_eq!(factor_via_ppcsg(15).unwrap(), FactorOutcome::Factors { p: 3, q: 5 });
        assert_eq!(factor_via_ppcsg(49).unwrap(), FactorOutcome::Factors { p: 7, q: 7 });
        assert_eq!(factor_via_ppcsg(13).unwrap(), FactorOutcome::PrimeOrUnit);
        assert_eq!(factor_via_ppcsg(1).unwrap(), FactorOutcome::PrimeOrUnit);
    }
}
