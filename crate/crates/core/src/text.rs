//! Line-oriented text formats: grammars, settings, and setting translations.
//!
//! ```text
//! ppcfg
//! nonterminals: S A
//! terminals: a b
//! start: S
//! group 1: S -> A | S -> _eps
//! group 2: A -> a | A -> b
//! ```
//!
//! Header lines may come in any order but precede the groups. Symbols used in
//! a group without being declared are kept as undeclared so that validation
//! can report them; names declared in both alphabets are a parse error.

use std::fmt::Write as _;

use crate::grammar::{GrammarError, Mode, ParameterSetting, PlainGrammar, Ppcfg, Production, ProductionGroup};
use crate::symbol::{Symbol, SymbolKind, SymbolTable, EPSILON_TOKEN};
use crate::transforms::{SettingTranslation, TransformKind};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

fn err(line: usize, message: impl Into<String>) -> ParseError {
    ParseError {
        line,
        message: message.into(),
    }
}

const RESERVED: [&str; 3] = ["->", "|", EPSILON_TOKEN];

fn strip_key<'a>(line: &'a str, key: &str) -> Option<&'a str> {
    line.strip_prefix(key)?.strip_prefix(':')
}

pub fn parse_grammar(text: &str) -> Result<Ppcfg, ParseError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    let (first_no, first) = lines.next().ok_or_else(|| err(1, "empty input"))?;
    let mode = match first {
        "ppcfg" => Mode::ContextFree,
        "ppcsg" => Mode::ContextSensitive,
        other => return Err(err(first_no, format!("expected `ppcfg` or `ppcsg`, found `{other}`"))),
    };
    let mut table = SymbolTable::new();
    let mut declared = [false; 3];
    let mut start_name: Option<(usize, String)> = None;
    let mut group_lines = Vec::new();
    for (no, line) in lines {
        let header = [("nonterminals", 0), ("terminals", 1), ("start", 2)]
            .into_iter()
            .find_map(|(key, slot)| strip_key(line, key).map(|rest| (key, slot, rest)));
        if let Some((key, slot, rest)) = header {
            if !group_lines.is_empty() {
                return Err(err(no, format!("`{key}:` after the first group")));
            }
            if std::mem::replace(&mut declared[slot], true) {
                return Err(err(no, format!("duplicate `{key}:` line")));
            }
            match slot {
                2 => {
                    let mut names = rest.split_whitespace();
                    let name = names.next().ok_or_else(|| err(no, "missing start symbol"))?;
                    if names.next().is_some() {
                        return Err(err(no, "start line names more than one symbol"));
                    }
                    start_name = Some((no, name.to_owned()));
                }
                _ => {
                    let kind = if slot == 0 {
                        SymbolKind::Nonterminal
                    } else {
                        SymbolKind::Terminal
                    };
                    for name in rest.split_whitespace() {
                        if RESERVED.contains(&name) {
                            return Err(err(no, format!("`{name}` is reserved")));
                        }
                        if table.intern(name, kind).is_none() {
                            return Err(err(no, format!("`{name}` declared as both terminal and nonterminal")));
                        }
                    }
                }
            }
        } else if line.starts_with("group") {
            group_lines.push((no, line));
        } else {
            return Err(err(no, format!("unrecognized line `{line}`")));
        }
    }
    for (slot, key) in ["nonterminals", "terminals", "start"].into_iter().enumerate() {
        if !declared[slot] {
            return Err(err(first_no, format!("missing `{key}:` line")));
        }
    }
    let mut lookup = |name: &str, no: usize| -> Result<Symbol, ParseError> {
        if RESERVED.contains(&name) {
            return Err(err(no, format!("`{name}` is reserved")));
        }
        Ok(table
            .get(name)
            .unwrap_or_else(|| table.intern(name, SymbolKind::Undeclared).expect("fresh name")))
    };
    let mut groups = Vec::with_capacity(group_lines.len());
    for (idx, (no, line)) in group_lines.into_iter().enumerate() {
        let (label, body) = line.split_once(':').ok_or_else(|| err(no, "group line needs `:`"))?;
        let id: usize = label
            .strip_prefix("group")
            .map(str::trim)
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| err(no, format!("bad group label `{label}`")))?;
        if id != idx + 1 {
            return Err(err(no, format!("group {id} out of order, expected {}", idx + 1)));
        }
        let mut alternatives = Vec::new();
        for alt in body.split('|') {
            let (lhs, rhs) = alt
                .split_once("->")
                .ok_or_else(|| err(no, format!("alternative `{}` needs `->`", alt.trim())))?;
            let lhs: Vec<&str> = lhs.split_whitespace().collect();
            let rhs: Vec<&str> = rhs.split_whitespace().collect();
            if lhs.is_empty() {
                return Err(err(no, "empty left-hand side"));
            }
            let rhs: Vec<&str> = match rhs.as_slice() {
                [] => return Err(err(no, format!("empty right-hand side; write `{EPSILON_TOKEN}`"))),
                [only] if *only == EPSILON_TOKEN => Vec::new(),
                _ => rhs,
            };
            let lhs = lhs.into_iter().map(|n| lookup(n, no)).collect::<Result<_, _>>()?;
            let rhs = rhs.into_iter().map(|n| lookup(n, no)).collect::<Result<_, _>>()?;
            alternatives.push(Production::new(lhs, rhs));
        }
        groups.push(ProductionGroup::new(alternatives));
    }
    let (start_no, start_name) = start_name.expect("checked above");
    let start = lookup(&start_name, start_no)?;
    Ok(Ppcfg::new(table, groups, start, mode))
}

pub fn write_grammar(g: &Ppcfg) -> String {
    let t = &g.symbols;
    let names = |kind| t.of_kind(kind).map(|s| t.name(s)).collect::<Vec<_>>().join(" ");
    let line = |key: &str, rest: String| {
        if rest.is_empty() {
            format!("{key}:\n")
        } else {
            format!("{key}: {rest}\n")
        }
    };
    let mut out = format!("{}\n", g.mode.keyword());
    out += &line("nonterminals", names(SymbolKind::Nonterminal));
    out += &line("terminals", names(SymbolKind::Terminal));
    out += &format!("start: {}\n", t.name(g.start));
    for (i, group) in g.groups.iter().enumerate() {
        let alts: Vec<String> = group.alternatives.iter().map(|p| p.render(t)).collect();
        let _ = writeln!(out, "group {}: {}", i + 1, alts.join(" | "));
    }
    out
}

/// Writes `g` as a grammar with one single-alternative group per rule.
pub fn write_plain(g: &PlainGrammar) -> String {
    write_grammar(&g.to_ppcfg())
}

/// Accepts comma-separated 1-based indices (`1,2,1`), a bit string when every
/// group has at most two alternatives (`010`, `0` is choice 1), or a single
/// index. The result may cover every group or only the choice-bearing ones,
/// in which case the padded groups are set to 1.
pub fn parse_setting(g: &Ppcfg, text: &str) -> Result<ParameterSetting, GrammarError> {
    let text = text.trim();
    let bad = || GrammarError::BadSetting(text.to_owned());
    let binary = g.groups.iter().all(|x| x.arity() <= 2);
    let choices: Vec<usize> = if text.contains(',') {
        text.split(',')
            .map(|s| s.trim().parse().map_err(|_| bad()))
            .collect::<Result<_, _>>()?
    } else if text.is_empty() {
        Vec::new()
    } else if binary && text.chars().all(|c| c == '0' || c == '1') {
        ParameterSetting::from_bits(text)?.into_inner()
    } else {
        vec![text.parse().map_err(|_| bad())?]
    };
    if choices.len() == g.n() {
        let p = ParameterSetting::new(choices);
        g.check_setting(&p)?;
        return Ok(p);
    }
    if choices.len() == g.choice_groups().len() {
        return g.expand_choice_setting(&choices);
    }
    Err(GrammarError::SettingLength {
        expected: g.n(),
        found: choices.len(),
    })
}

/// Sidecar layout:
///
/// ```text
/// translation binarize
/// source: 3 3
/// target: 2 2 2 2
/// map 1: 1 2
/// map 2: 3 4
/// ```
///
/// `map i` lists the 1-based target groups owned by source group `i`.
pub fn write_translation(t: &SettingTranslation) -> String {
    let join = |xs: &[usize]| xs.iter().map(usize::to_string).collect::<Vec<_>>().join(" ");
    let mut out = format!("translation {}\n", t.kind.keyword());
    let _ = writeln!(out, "source: {}", join(&t.source_arities));
    let _ = writeln!(out, "target: {}", join(&t.target_arities));
    for (i, block) in t.blocks.iter().enumerate() {
        let one_based: Vec<usize> = block.iter().map(|g| g + 1).collect();
        let _ = writeln!(out, "map {}: {}", i + 1, join(&one_based));
    }
    out
}

pub fn parse_translation(text: &str) -> Result<SettingTranslation, ParseError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    let (no, first) = lines.next().ok_or_else(|| err(1, "empty input"))?;
    let kind = match first.strip_prefix("translation ").map(str::trim) {
        Some("homogenize") => TransformKind::Homogenize,
        Some("binarize") => TransformKind::Binarize,
        _ => {
            return Err(err(
                no,
                format!("expected `translation homogenize|binarize`, found `{first}`"),
            ))
        }
    };
    let numbers = |no: usize, s: &str| -> Result<Vec<usize>, ParseError> {
        s.split_whitespace()
            .map(|x| x.parse().map_err(|_| err(no, format!("bad number `{x}`"))))
            .collect()
    };
    let mut source = None;
    let mut target = None;
    let mut blocks = Vec::new();
    for (no, line) in lines {
        if let Some(rest) = strip_key(line, "source") {
            source = Some(numbers(no, rest)?);
        } else if let Some(rest) = strip_key(line, "target") {
            target = Some(numbers(no, rest)?);
        } else if let Some(rest) = line.strip_prefix("map ") {
            let (id, body) = rest.split_once(':').ok_or_else(|| err(no, "map line needs `:`"))?;
            if id.trim().parse::<usize>().ok() != Some(blocks.len() + 1) {
                return Err(err(no, format!("map {} out of order", id.trim())));
            }
            let block = numbers(no, body)?;
            if block.contains(&0) {
                return Err(err(no, "group indices are 1-based"));
            }
            blocks.push(block.into_iter().map(|g| g - 1).collect::<Vec<_>>());
        } else {
            return Err(err(no, format!("unrecognized line `{line}`")));
        }
    }
    let source_arities = source.ok_or_else(|| err(no, "missing `source:` line"))?;
    let target_arities = target.ok_or_else(|| err(no, "missing `target:` line"))?;
    if blocks.len() != source_arities.len() {
        return Err(err(
            no,
            format!("{} map lines for {} source groups", blocks.len(), source_arities.len()),
        ));
    }
    if blocks.iter().flatten().any(|&g| g >= target_arities.len()) {
        return Err(err(no, "map refers to a target group that does not exist"));
    }
    Ok(SettingTranslation {
        kind,
        source_arities,
        target_arities,
        blocks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::Violation;
    use crate::oracle::build_adversary_grammar;
    use crate::transforms::binarize;

    #[test]
    fn adversary_round_trip() {
        let g = build_adversary_grammar(2);
        let text = write_grammar(&g);
        assert_eq!(
            text,
            "ppcfg\nnonterminals: START X_1 X_2\nterminals: 0 1\nstart: START\n\
             group 1: START -> X_1 X_2 | START -> X_1 X_2\n\
             group 2: X_1 -> 0 | X_1 -> 1\ngroup 3: X_2 -> 0 | X_2 -> 1\n"
        );
        assert_eq!(parse_grammar(&text).unwrap(), g);
    }

    #[test]
    fn epsilon_and_context_sensitive_lhs() {
        let text = "ppcsg\nnonterminals: S C Z\nterminals: c\nstart: S\n\
                    group 1: C C -> C Z | C C -> C Z\ngroup 2: S -> _eps | S -> C\n";
        let g = parse_grammar(text).unwrap();
        assert_eq!(g.mode, Mode::ContextSensitive);
        assert!(g.groups[1].alternatives[0].is_epsilon());
        assert_eq!(g.groups[0].alternatives[0].lhs.len(), 2);
        assert_eq!(write_grammar(&g), text);
    }

    #[test]
    fn undeclared_symbol_is_a_violation_not_a_parse_error() {
        let g = parse_grammar("ppcfg\nnonterminals: S\nterminals: a\nstart: S\ngroup 1: S -> a b | S -> a\n").unwrap();
        assert_eq!(
            g.validate().violations,
            vec![Violation::UndeclaredSymbol { name: "b".into() }]
        );
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let e = parse_grammar("ppcfg\nnonterminals: S\nterminals: S\nstart: S\n").unwrap_err();
        assert_eq!(e.line, 3);
        let e = parse_grammar("ppcfg\nnonterminals: S\nterminals: a\nstart: S\ngroup 1: S a\n").unwrap_err();
        assert_eq!(e.line, 5);
        let e = parse_grammar("cfg\n").unwrap_err();
        assert_eq!(e.line, 1);
        let e = parse_grammar("ppcfg\nnonterminals: S\nterminals: a\nstart: S\ngroup 2: S -> a\n").unwrap_err();
        assert!(e.message.contains("out of order"));
    }

    #[test]
    fn settings_in_every_form() {
        let g = build_adversary_grammar(2);
        assert_eq!(parse_setting(&g, "1,1,2").unwrap().choices(), &[1, 1, 2]);
        assert_eq!(parse_setting(&g, "001").unwrap().choices(), &[1, 1, 2]);
        assert_eq!(parse_setting(&g, "01").unwrap().choices(), &[1, 1, 2]);
        assert_eq!(parse_setting(&g, "2,1").unwrap().choices(), &[1, 2, 1]);
        assert!(matches!(
            parse_setting(&g, "0101"),
            Err(GrammarError::SettingLength { .. })
        ));
        assert!(matches!(
            parse_setting(&g, "1,3,1"),
            Err(GrammarError::ChoiceOutOfRange { .. })
        ));
        assert!(matches!(parse_setting(&g, "x"), Err(GrammarError::BadSetting(_))));
    }

    #[test]
    fn translation_round_trip() {
        let g =
            parse_grammar("ppcfg\nnonterminals: S\nterminals: a\nstart: S\ngroup 1: S -> a | S -> a a | S -> _eps\n")
                .unwrap();
        let (b, t) = binarize(&g).unwrap();
        let text = write_translation(&t);
        assert_eq!(text, "translation binarize\nsource: 3\ntarget: 2 2\nmap 1: 1 2\n");
        assert_eq!(parse_translation(&text).unwrap(), t);
        assert_eq!(parse_grammar(&write_grammar(&b)).unwrap(), b);
    }
}
