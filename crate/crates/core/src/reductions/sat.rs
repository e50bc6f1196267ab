//! 3SAT as PPCFG learning: a setting covers every clause terminal exactly
//! when the assignment it encodes satisfies the instance.

use crate::engines::{cyk_member, to_cnf, EngineError};
use crate::grammar::{GrammarError, Mode, ParameterSetting, Ppcfg, Production, ProductionGroup};
use crate::symbol::SymbolTable;

/// A signed variable reference; `var` is 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Literal {
    pub var: usize,
    pub positive: bool,
}

impl Literal {
    pub fn from_dimacs(x: i64) -> Self {
        Literal {
            var: x.unsigned_abs() as usize,
            positive: x > 0,
        }
    }

    pub fn holds(self, a: &Assignment) -> bool {
        a.values[self.var - 1] == self.positive
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SatInstance {
    pub num_vars: usize,
    pub clauses: Vec<Vec<Literal>>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SatError {
    #[error("line {line}: {message}")]
    Dimacs { line: usize, message: String },
    #[error("clause {clause} is empty")]
    EmptyClause { clause: usize },
    #[error("clause {clause} mentions variable {var}, instance has {num_vars}")]
    VariableOutOfRange { clause: usize, var: usize, num_vars: usize },
    #[error("{needed} settings exceed the search budget of {budget}")]
    Budget { needed: u128, budget: u128 },
    #[error("assignment has {found} values, instance has {expected} variables")]
    AssignmentLength { expected: usize, found: usize },
    #[error(transparent)]
    Grammar(#[from] GrammarError),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

impl SatInstance {
    pub fn new(num_vars: usize, clauses: Vec<Vec<Literal>>) -> Result<Self, SatError> {
        for (ci, clause) in clauses.iter().enumerate() {
            if clause.is_empty() {
                return Err(SatError::EmptyClause { clause: ci + 1 });
            }
            if let Some(l) = clause.iter().find(|l| l.var == 0 || l.var > num_vars) {
                return Err(SatError::VariableOutOfRange {
                    clause: ci + 1,
                    var: l.var,
                    num_vars,
                });
            }
        }
        Ok(SatInstance { num_vars, clauses })
    }

    pub fn is_satisfied_by(&self, a: &Assignment) -> bool {
        a.values.len() == self.num_vars && self.clauses.iter().all(|c| c.iter().any(|l| l.holds(a)))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Assignment {
    pub values: Vec<bool>,
}

impl Assignment {
    /// `1` for true, `0` for false, variable 1 first.
    pub fn to_bits(&self) -> String {
        self.values.iter().map(|&v| if v { '1' } else { '0' }).collect()
    }
}

/// Reads DIMACS CNF. Comment lines start with `c`; `%` ends the input. In
/// strict mode clauses longer than three literals are rejected.
pub fn parse_dimacs(text: &str, strict: bool) -> Result<SatInstance, SatError> {
    let fail = |line: usize, message: String| SatError::Dimacs { line, message };
    let mut header: Option<(usize, usize, usize)> = None;
    let mut clauses = Vec::new();
    let mut current: Vec<Literal> = Vec::new();
    let mut current_line = 0;
    for (i, raw) in text.lines().enumerate() {
        let no = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if line.starts_with('%') {
            break;
        }
        if line.starts_with('p') {
            if header.is_some() {
                return Err(fail(no, "duplicate problem line".into()));
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            let (vars, count) = match parts.as_slice() {
                ["p", "cnf", v, c] => (v.parse().ok(), c.parse().ok()),
                _ => (None, None),
            };
            let (Some(vars), Some(count)) = (vars, count) else {
                return Err(fail(no, format!("malformed header `{line}`")));
            };
            header = Some((vars, count, no));
            continue;
        }
        let Some((vars, _, _)) = header else {
            return Err(fail(no, "clause before `p cnf` header".into()));
        };
        for tok in line.split_whitespace() {
            let x: i64 = tok.parse().map_err(|_| fail(no, format!("bad literal `{tok}`")))?;
            if x == 0 {
                if current.is_empty() {
                    return Err(fail(no, "empty clause".into()));
                }
                if strict && current.len() > 3 {
                    return Err(fail(
                        no,
                        format!("clause has {} literals, strict mode allows 3", current.len()),
                    ));
                }
                clauses.push(std::mem::take(&mut current));
                continue;
            }
            let lit = Literal::from_dimacs(x);
            if lit.var > vars {
                return Err(fail(no, format!("variable {} exceeds declared {vars}", lit.var)));
            }
            if current.is_empty() {
                current_line = no;
            }
            current.push(lit);
        }
    }
    let Some((vars, count, header_line)) = header else {
        return Err(fail(text.lines().count().max(1), "missing `p cnf` header".into()));
    };
    if !current.is_empty() {
        return Err(fail(current_line, "clause not terminated by 0".into()));
    }
    if clauses.len() != count {
        return Err(fail(
            header_line,
            format!("header declares {count} clauses, found {}", clauses.len()),
        ));
    }
    SatInstance::new(vars, clauses)
}

/// The grammar plus the index of each variable's `x_i -> x_i_T | x_i -> x_i_F` group.
#[derive(Debug, Clone)]
pub struct SatReduction {
    pub instance: SatInstance,
    pub grammar: Ppcfg,
    pub choice_groups: Vec<usize>,
}

/// Groups, in order: `START -> x_1 .. x_n`; one T/F group per variable; one
/// `x_i -> ε` group per variable; one `x_j_T -> c_i` (or `x_j_F -> c_i`) group
/// per literal occurrence. All but the T/F groups are padded to two copies.
pub fn sat_to_ppcfg(inst: &SatInstance) -> SatReduction {
    let mut t = SymbolTable::new();
    let start = t.nonterminal("START");
    let xs: Vec<_> = (1..=inst.num_vars).map(|i| t.nonterminal(&format!("x_{i}"))).collect();
    let trues: Vec<_> = (1..=inst.num_vars)
        .map(|i| t.nonterminal(&format!("x_{i}_T")))
        .collect();
    let falses: Vec<_> = (1..=inst.num_vars)
        .map(|i| t.nonterminal(&format!("x_{i}_F")))
        .collect();
    let cs: Vec<_> = (1..=inst.clauses.len())
        .map(|i| t.terminal(&format!("c_{i}")))
        .collect();
    let mut groups = vec![ProductionGroup::padded(Production::unary(start, xs.clone()), 2)];
    let mut choice_groups = Vec::with_capacity(inst.num_vars);
    for v in 0..inst.num_vars {
        choice_groups.push(groups.len());
        groups.push(ProductionGroup::new(vec![
            Production::unary(xs[v], vec![trues[v]]),
            Production::unary(xs[v], vec![falses[v]]),
        ]));
    }
    groups.extend(
        xs.iter()
            .map(|&x| ProductionGroup::padded(Production::unary(x, vec![]), 2)),
    );
    for (ci, clause) in inst.clauses.iter().enumerate() {
        let mut seen = Vec::new();
        for lit in clause {
            if seen.contains(lit) {
                continue;
            }
            seen.push(*lit);
            let head = if lit.positive {
                trues[lit.var - 1]
            } else {
                falses[lit.var - 1]
            };
            groups.push(ProductionGroup::padded(Production::unary(head, vec![cs[ci]]), 2));
        }
    }
    SatReduction {
        instance: inst.clone(),
        grammar: Ppcfg::new(t, groups, start, Mode::ContextFree),
        choice_groups,
    }
}

impl SatReduction {
    /// True picks `x_i -> x_i_T`; every other group is set to 1.
    pub fn assignment_to_setting(&self, a: &Assignment) -> Result<ParameterSetting, SatError> {
        if a.values.len() != self.choice_groups.len() {
            return Err(SatError::AssignmentLength {
                expected: self.choice_groups.len(),
                found: a.values.len(),
            });
        }
        let choices: Vec<usize> = a.values.iter().map(|&v| if v { 1 } else { 2 }).collect();
        Ok(self.grammar.expand_choice_setting(&choices)?)
    }

    pub fn setting_to_assignment(&self, p: &ParameterSetting) -> Result<Assignment, SatError> {
        self.grammar.check_setting(p)?;
        Ok(Assignment {
            values: self.choice_groups.iter().map(|&g| p.choices()[g] == 1).collect(),
        })
    }

    /// Whether every clause terminal `c_i` is derivable on its own in `Γ_p`.
    pub fn covers_all_clauses(&self, p: &ParameterSetting) -> Result<bool, SatError> {
        let cnf = to_cnf(&self.grammar.instantiate(p)?)?;
        for c in self.grammar.symbols.terminals() {
            if !cyk_member(&cnf, &[c])? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// DPLL with unit propagation and pure-literal elimination.
pub fn dpll_solve(inst: &SatInstance) -> Option<Assignment> {
    let mut partial = vec![None; inst.num_vars];
    if dpll(&inst.clauses, &mut partial) {
        Some(Assignment {
            values: partial.into_iter().map(|v| v.unwrap_or(false)).collect(),
        })
    } else {
        None
    }
}

fn dpll(clauses: &[Vec<Literal>], partial: &mut Vec<Option<bool>>) -> bool {
    let saved = partial.clone();
    loop {
        let mut unit = None;
        let mut all_satisfied = true;
        for clause in clauses {
            let mut open = None;
            let mut open_count = 0;
            let mut satisfied = false;
            for &l in clause {
                match partial[l.var - 1] {
                    Some(v) if v == l.positive => {
                        satisfied = true;
                        break;
                    }
                    Some(_) => {}
                    None => {
                        open_count += 1;
                        open = Some(l);
                    }
                }
            }
            if satisfied {
                continue;
            }
            all_satisfied = false;
            match open_count {
                0 => {
                    *partial = saved;
                    return false;
                }
                1 => unit = open,
                _ => {}
            }
        }
        if all_satisfied {
            return true;
        }
        match unit {
            Some(l) => partial[l.var - 1] = Some(l.positive),
            None => break,
        }
    }
    let mut polarity: Vec<(bool, bool)> = vec![(false, false); partial.len()];
    for clause in clauses {
        if clause.iter().any(|l| partial[l.var - 1] == Some(l.positive)) {
            continue;
        }
        for l in clause.iter().filter(|l| partial[l.var - 1].is_none()) {
            let p = &mut polarity[l.var - 1];
            if l.positive {
                p.0 = true;
            } else {
                p.1 = true;
            }
        }
    }
    if let Some(v) = polarity.iter().position(|&(pos, neg)| pos != neg) {
        partial[v] = Some(polarity[v].0);
        if dpll(clauses, partial) {
            return true;
        }
        *partial = saved;
        return false;
    }
    let branch = polarity
        .iter()
        .position(|&(pos, neg)| pos && neg)
        .expect("an unsatisfied clause has an open literal");
    for value in [true, false] {
        partial[branch] = Some(value);
        if dpll(clauses, partial) {
            return true;
        }
        partial[branch] = None;
    }
    *partial = saved;
    false
}

/// Searches choice settings in lexicographic order for one covering every
/// clause, refusing if there are more than `max_settings`.
pub fn sat_solve_via_grammar(
    inst: &SatInstance,
    max_settings: u128,
) -> Result<Option<(Assignment, ParameterSetting)>, SatError> {
    let needed = 1u128.checked_shl(inst.num_vars as u32).unwrap_or(u128::MAX);
    if needed > max_settings {
        return Err(SatError::Budget {
            needed,
            budget: max_settings,
        });
    }
    let r = sat_to_ppcfg(inst);
    for bits in 0..needed {
        let values = (0..inst.num_vars)
            .map(|i| bits >> (inst.num_vars - 1 - i) & 1 == 0)
            .collect();
        let p = r.assignment_to_setting(&Assignment { values })?;
        if r.covers_all_clauses(&p)? {
            return Ok(Some((r.setting_to_assignment(&p)?, p)));
        }
    }
    Ok(None)
}
