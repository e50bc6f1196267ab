use std::collections::HashSet;
use std::fmt::Write as _;

use super::{Hypothesis, OracleAnswer, QueryKey, QueryKind};
use crate::symbol::SymbolTable;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TranscriptEntry {
    /// 1-based position in the transcript.
    pub seq: usize,
    pub query: QueryKind,
    pub answer: OracleAnswer,
    /// Whether this query had not been asked before.
    pub fresh: bool,
    /// Distinct queries asked up to and including this one.
    pub distinct_so_far: usize,
}

/// Ordered record of queries and answers.
#[derive(Debug, Clone, Default)]
pub struct Transcript {
    entries: Vec<TranscriptEntry>,
    seen: HashSet<QueryKey>,
}

impl Transcript {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record(&mut self, query: QueryKind, key: QueryKey, answer: OracleAnswer) -> &TranscriptEntry {
        let fresh = self.seen.insert(key);
        let entry = TranscriptEntry {
            seq: self.entries.len() + 1,
            query,
            answer,
            fresh,
            distinct_so_far: self.seen.len(),
        };
        self.entries.push(entry);
        self.entries.last().expect("just pushed")
    }

    pub fn entries(&self) -> &[TranscriptEntry] {
        &self.entries
    }

    pub fn total(&self) -> usize {
        self.entries.len()
    }

    pub fn distinct(&self) -> usize {
        self.seen.len()
    }

    pub fn first_true(&self) -> Option<&TranscriptEntry> {
        self.entries.iter().find(|e| e.answer.is_true())
    }

    /// Answers other than `true` given before the first `true`.
    pub fn negatives_before_first_true(&self) -> usize {
        self.entries.iter().take_while(|e| !e.answer.is_true()).count()
    }

    /// One line per query: `seq<TAB>kind<TAB>payload<TAB>answer`.
    pub fn to_tsv(&self, table: &SymbolTable) -> String {
        let mut out = String::new();
        for e in &self.entries {
            let payload = match &e.query {
                QueryKind::Membership(w) => table.render(w),
                QueryKind::Equivalence(Hypothesis::Setting(p)) => p.to_string(),
                QueryKind::Equivalence(Hypothesis::Grammar(g)) => g
                    .rules
                    .iter()
                    .map(|r| r.render(&g.symbols))
                    .collect::<Vec<_>>()
                    .join("; "),
            };
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}",
                e.seq,
                e.query.kind_name(),
                payload,
                e.answer.render(table)
            );
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distinct_counter_ignores_repeats() {
        let mut t = Transcript::new();
        let q = QueryKind::Membership(vec![]);
        t.record(q.clone(), QueryKey::Membership(vec![]), OracleAnswer::False);
        let again = t.record(q, QueryKey::Membership(vec![]), OracleAnswer::False).clone();
        assert!(!again.fresh);
        assert_eq!(again.distinct_so_far, 1);
        assert_eq!((t.total(), t.distinct()), (2, 1));
    }

    #[test]
    fn tsv_layout() {
        let mut table = SymbolTable::new();
        let zero = table.terminal("0");
        let one = table.terminal("1");
        let mut t = Transcript::new();
        t.record(
            QueryKind::Membership(vec![zero, one]),
            QueryKey::Membership(vec![zero, one]),
            OracleAnswer::False,
        );
        t.record(
            QueryKind::Membership(vec![one]),
            QueryKey::Membership(vec![one]),
            OracleAnswer::Counterexample(vec![one, one]),
        );
        assert_eq!(
            t.to_tsv(&table),
            "1\tmembership\t0 1\tfalse\n2\tmembership\t1\tfalse counterexample=1 1\n"
        );
    }
}
