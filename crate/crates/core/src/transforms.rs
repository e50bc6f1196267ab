//! Padding of heterogeneous groups and binarization of `k`-ary groups into
//! chains of binary groups, each with a two-way setting translation.

use std::sync::Arc;

use crate::grammar::{GrammarError, ParameterSetting, Ppcfg, Production, ProductionGroup, ValidationReport, Violation};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TransformError {
    #[error("group {group} has no alternatives")]
    EmptyGroup { group: usize },
    #[error("binarize needs a homogeneous grammar")]
    NotHomogeneous,
    #[error("binarize needs k > 2, grammar has k = {k}")]
    NothingToBinarize { k: usize },
    #[error("group {group}: alternatives rewrite different left-hand sides")]
    MixedHeads { group: usize },
    #[error("invalid grammar:\n{0}")]
    Invalid(ValidationReport),
    #[error("setting has {found} entries, translation expects {expected}")]
    SettingLength { expected: usize, found: usize },
    #[error(transparent)]
    Grammar(#[from] GrammarError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransformKind {
    Homogenize,
    Binarize,
}

impl TransformKind {
    pub fn keyword(self) -> &'static str {
        match self {
            TransformKind::Homogenize => "homogenize",
            TransformKind::Binarize => "binarize",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// Source settings to transformed settings.
    Forward,
    Backward,
}

/// Maps settings between a grammar and its transform. Source group `i` owns
/// the target groups `blocks[i]` (0-based, contiguous, in order).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SettingTranslation {
    pub kind: TransformKind,
    pub source_arities: Vec<usize>,
    pub target_arities: Vec<usize>,
    pub blocks: Vec<Vec<usize>>,
}

impl SettingTranslation {
    pub fn identity(kind: TransformKind, arities: Vec<usize>) -> Self {
        let blocks = (0..arities.len()).map(|i| vec![i]).collect();
        SettingTranslation {
            kind,
            source_arities: arities.clone(),
            target_arities: arities,
            blocks,
        }
    }
}

fn check_structure(g: &Ppcfg) -> Result<(), TransformError> {
    let report = g.validate();
    let fatal: Vec<Violation> = report
        .violations
        .iter()
        .filter(|v| !matches!(v, Violation::GroupArity { .. }))
        .cloned()
        .collect();
    if let Some(Violation::EmptyGroup { group }) = fatal.iter().find(|v| matches!(v, Violation::EmptyGroup { .. })) {
        return Err(TransformError::EmptyGroup { group: *group });
    }
    if !fatal.is_empty() {
        return Err(TransformError::Invalid(ValidationReport { violations: fatal }));
    }
    Ok(())
}

/// Pads every group to the largest arity by repeating its last alternative.
pub fn homogenize(g: &Ppcfg) -> Result<(Ppcfg, SettingTranslation), TransformError> {
    check_structure(g)?;
    let k = g.groups.iter().map(ProductionGroup::arity).max().unwrap_or(1);
    let groups = g
        .groups
        .iter()
        .map(|group| {
            let mut alts = group.alternatives.clone();
            let last = alts.last().expect("nonempty group").clone();
            alts.resize(k, last);
            ProductionGroup::new(alts)
        })
        .collect();
    let out = Ppcfg {
        symbols: Arc::clone(&g.symbols),
        groups,
        start: g.start,
        mode: g.mode,
    };
    let mut t = SettingTranslation::identity(TransformKind::Homogenize, g.groups.iter().map(|x| x.arity()).collect());
    t.target_arities = vec![k; g.n()];
    Ok((out, t))
}

/// Replaces each group `λ -> (α_1, .., α_k)` by the chain
/// `λ -> (α_1, A_2)`, `A_2 -> (α_2, A_3)`, .., `A_{k-1} -> (α_{k-1}, α_k)`.
///
/// The original left-hand side heads the chain, so no other rule needs
/// rewriting. Fresh nonterminals are named `<head>#<group>#<position>`.
pub fn binarize(g: &Ppcfg) -> Result<(Ppcfg, SettingTranslation), TransformError> {
    check_structure(g)?;
    let k = g.k().ok_or(TransformError::NotHomogeneous)?;
    if k <= 2 {
        return Err(TransformError::NothingToBinarize { k });
    }
    let mut table = (*g.symbols).clone();
    let mut groups = Vec::with_capacity(g.n() * (k - 1));
    let mut blocks = Vec::with_capacity(g.n());
    for (gi, group) in g.groups.iter().enumerate() {
        let lhs = group.alternatives[0].lhs.clone();
        if group.alternatives.iter().any(|a| a.lhs != lhs) {
            return Err(TransformError::MixedHeads { group: gi + 1 });
        }
        let head: Vec<&str> = lhs.iter().map(|&s| g.symbols.name(s)).collect();
        let head = head.join("_");
        let links: Vec<_> = (2..k)
            .map(|pos| table.fresh_nonterminal(&format!("{head}#{}#{pos}", gi + 1)))
            .collect();
        let mut block = Vec::with_capacity(k - 1);
        for pos in 1..k {
            let from = if pos == 1 { lhs.clone() } else { vec![links[pos - 2]] };
            let first = Production::new(from.clone(), group.alternatives[pos - 1].rhs.clone());
            let second = if pos == k - 1 {
                Production::new(from, group.alternatives[k - 1].rhs.clone())
            } else {
                Production::new(from, vec![links[pos - 1]])
            };
            block.push(groups.len());
            groups.push(ProductionGroup::new(vec![first, second]));
        }
        blocks.push(block);
    }
    let out = Ppcfg::new(table, groups, g.start, g.mode);
    let t = SettingTranslation {
        kind: TransformKind::Binarize,
        source_arities: vec![k; g.n()],
        target_arities: vec![2; g.n() * (k - 1)],
        blocks,
    };
    Ok((out, t))
}

/// Carries a setting across `t`.
///
/// Forward binarization selects alternative `c` by continuing through the
/// first `c - 1` chain groups; chain groups after the selecting one are set
/// to 1. Backward reads the first chain group that stops (or `k` if none).
pub fn translate_setting(
    t: &SettingTranslation,
    p: &ParameterSetting,
    direction: Direction,
) -> Result<ParameterSetting, TransformError> {
    let (from, to) = match direction {
        Direction::Forward => (&t.source_arities, &t.target_arities),
        Direction::Backward => (&t.target_arities, &t.source_arities),
    };
    if p.len() != from.len() {
        return Err(TransformError::SettingLength {
            expected: from.len(),
            found: p.len(),
        });
    }
    for (i, (&c, &a)) in p.choices().iter().zip(from).enumerate() {
        if c == 0 || c > a {
            return Err(GrammarError::ChoiceOutOfRange {
                group: i + 1,
                choice: c,
                arity: a,
            }
            .into());
        }
    }
    let choices = p.choices();
    let out = match (t.kind, direction) {
        (TransformKind::Homogenize, Direction::Forward) => choices.to_vec(),
        (TransformKind::Homogenize, Direction::Backward) => choices.iter().zip(to).map(|(&c, &a)| c.min(a)).collect(),
        (TransformKind::Binarize, Direction::Forward) => {
            let mut out = vec![1; to.len()];
            for (block, &c) in t.blocks.iter().zip(choices) {
                for (j, &gi) in block.iter().enumerate() {
                    out[gi] = if j + 1 < c { 2 } else { 1 };
                }
                if c == block.len() + 1 {
                    out[*block.last().expect("k > 2")] = 2;
                }
            }
            out
        }
        (TransformKind::Binarize, Direction::Backward) => t
            .blocks
            .iter()
            .map(|block| {
                block
                    .iter()
                    .position(|&gi| choices[gi] == 1)
                    .map_or(block.len() + 1, |j| j + 1)
            })
            .collect(),
    };
    Ok(ParameterSetting::new(out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engines::{enumerate_language, DerivationBudget};
    use crate::grammar::Mode;
    use crate::symbol::SymbolTable;

    fn three_way() -> Ppcfg {
        let mut t = SymbolTable::new();
        let s = t.nonterminal("S");
        let a = t.terminal("a");
        let b = t.terminal("b");
        let group = ProductionGroup::new(vec![
            Production::unary(s, vec![a]),
            Production::unary(s, vec![b]),
            Production::unary(s, vec![a, b]),
        ]);
        Ppcfg::new(t, vec![group], s, Mode::ContextFree)
    }

    #[test]
    fn pads_with_last_alternative() {
        let mut t = SymbolTable::new();
        let s = t.nonterminal("S");
        let a = t.terminal("a");
        let b = t.terminal("b");
        let g = Ppcfg::new(
            t,
            vec![
                ProductionGroup::new(vec![Production::unary(s, vec![a])]),
                ProductionGroup::new(vec![Production::unary(s, vec![a]), Production::unary(s, vec![b])]),
            ],
            s,
            Mode::ContextFree,
        );
        let (h, tr) = homogenize(&g).unwrap();
        assert_eq!(h.k(), Some(2));
        assert_eq!(h.groups[0].alternatives, vec![Production::unary(s, vec![a]); 2]);
        let back = translate_setting(&tr, &ParameterSetting::new(vec![2, 2]), Direction::Backward).unwrap();
        assert_eq!(back.choices(), &[1, 2]);
    }

    #[test]
    fn homogeneous_input_is_unchanged() {
        let g = three_way();
        let (h, tr) = homogenize(&g).unwrap();
        assert_eq!(h, g);
        let p = ParameterSetting::new(vec![3]);
        assert_eq!(translate_setting(&tr, &p, Direction::Forward).unwrap(), p);
    }

    #[test]
    fn binarized_chain_shape() {
        let (b, tr) = binarize(&three_way()).unwrap();
        assert_eq!(b.n(), 2);
        assert_eq!(b.k(), Some(2));
        let rendered: Vec<Vec<String>> = b
            .groups
            .iter()
            .map(|g| g.alternatives.iter().map(|p| p.render(&b.symbols)).collect())
            .collect();
        assert_eq!(rendered, [["S -> a", "S -> S#1#2"], ["S#1#2 -> b", "S#1#2 -> a b"]]);
        assert!(b.validate().is_ok());
        let fwd = |c| translate_setting(&tr, &ParameterSetting::new(vec![c]), Direction::Forward).unwrap();
        assert_eq!(fwd(1).choices(), &[1, 1]);
        assert_eq!(fwd(2).choices(), &[2, 1]);
        assert_eq!(fwd(3).choices(), &[2, 2]);
        let back = translate_setting(&tr, &ParameterSetting::new(vec![1, 2]), Direction::Backward).unwrap();
        assert_eq!(back.choices(), &[1]);
    }

    #[test]
    fn binarized_settings_preserve_language() {
        let g = three_way();
        let (b, tr) = binarize(&g).unwrap();
        let budget = DerivationBudget::default();
        for p in g.settings() {
            let q = translate_setting(&tr, &p, Direction::Forward).unwrap();
            let before = enumerate_language(&g.instantiate(&p).unwrap(), 4, &budget).unwrap();
            let after = enumerate_language(&b.instantiate(&q).unwrap(), 4, &budget).unwrap();
            assert_eq!(before, after);
            assert_eq!(translate_setting(&tr, &q, Direction::Backward).unwrap(), p);
        }
    }

    #[test]
    fn group_count_is_n_times_k_minus_one() {
        let mut t = SymbolTable::new();
        let s = t.nonterminal("S");
        let x = t.nonterminal("X");
        let a = t.terminal("a");
        let alts = |h| (0..4).map(|i| Production::unary(h, vec![a; i])).collect::<Vec<_>>();
        let g = Ppcfg::new(
            t,
            vec![ProductionGroup::new(alts(s)), ProductionGroup::new(alts(x))],
            s,
            Mode::ContextFree,
        );
        assert_eq!(binarize(&g).unwrap().0.n(), 6);
    }

    #[test]
    fn rejects_small_k_and_mixed_heads() {
        let mut t = SymbolTable::new();
        let s = t.nonterminal("S");
        let x = t.nonterminal("X");
        let a = t.terminal("a");
        let g = Ppcfg::new(
            t.clone(),
            vec![ProductionGroup::new(vec![
                Production::unary(s, vec![a]),
                Production::unary(s, vec![]),
            ])],
            s,
            Mode::ContextFree,
        );
        assert_eq!(binarize(&g).unwrap_err(), TransformError::NothingToBinarize { k: 2 });
        let mixed = Ppcfg::new(
            t,
            vec![ProductionGroup::new(vec![
                Production::unary(s, vec![a]),
                Production::unary(x, vec![a]),
                Production::unary(s, vec![x]),
            ])],
            s,
            Mode::ContextFree,
        );
        assert_eq!(binarize(&mixed).unwrap_err(), TransformError::MixedHeads { group: 1 });
    }

    #[test]
    fn fresh_names_avoid_collisions() {
        let mut t = SymbolTable::new();
        let s = t.nonterminal("S");
        let taken = t.nonterminal("S#1#2");
        let a = t.terminal("a");
        let g = Ppcfg::new(
            t,
            vec![
                ProductionGroup::new(vec![
                    Production::unary(s, vec![a]),
                    Production::unary(s, vec![taken]),
                    Production::unary(s, vec![]),
                ]),
                ProductionGroup::padded(Production::unary(taken, vec![a, a]), 3),
            ],
            s,
            Mode::ContextFree,
        );
        let (b, _) = binarize(&g).unwrap();
        assert!(b.symbols.get("S#1#2'").is_some());
        assert!(b.validate().is_ok());
    }

    #[test]
    fn translation_rejects_wrong_length() {
        let (_, tr) = binarize(&three_way()).unwrap();
        let err = translate_setting(&tr, &ParameterSetting::new(vec![1, 1]), Direction::Forward).unwrap_err();
        assert_eq!(err, TransformError::SettingLength { expected: 1, found: 2 });
    }
}
