//! Interned terminal and nonterminal symbols.

use std::collections::HashMap;
use std::fmt;

/// Reserved token standing for an empty right-hand side in the text format.
pub const EPSILON_TOKEN: &str = "_eps";

/// Handle into a [`SymbolTable`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol(pub(crate) u32);

impl Symbol {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// A sequence of symbols; terminal-only words and sentential forms share this type.
pub type Word = Vec<Symbol>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SymbolKind {
    Terminal,
    Nonterminal,
    /// Used in a production without appearing in either alphabet declaration.
    /// Only the text parser creates these; `validate` reports them.
    Undeclared,
}

#[derive(Debug, Clone)]
struct Entry {
    name: String,
    kind: SymbolKind,
}

/// The alphabets V and Σ of a grammar, with names interned to [`Symbol`] handles.
///
/// Handles are assigned in insertion order and never change, so transforms that
/// clone a table and append fresh nonterminals keep every existing symbol valid.
#[derive(Debug, Clone, Default)]
pub struct SymbolTable {
    entries: Vec<Entry>,
    by_name: HashMap<String, Symbol>,
}

impl SymbolTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Interns `name` with `kind`. Returns the existing handle if the name is
    /// already present with the same kind, `None` on a kind conflict.
    pub fn intern(&mut self, name: &str, kind: SymbolKind) -> Option<Symbol> {
        if let Some(&sym) = self.by_name.get(name) {
            return (self.kind(sym) == kind).then_some(sym);
        }
        let sym = Symbol(self.entries.len() as u32);
        self.entries.push(Entry {
            name: name.to_owned(),
            kind,
        });
        self.by_name.insert(name.to_owned(), sym);
        Some(sym)
    }

    /// Panics if `name` is already a terminal.
    pub fn nonterminal(&mut self, name: &str) -> Symbol {
        self.intern(name, SymbolKind::Nonterminal)
            .unwrap_or_else(|| panic!("`{name}` already declared as a terminal"))
    }

    /// Panics if `name` is already a nonterminal.
    pub fn terminal(&mut self, name: &str) -> Symbol {
        self.intern(name, SymbolKind::Terminal)
            .unwrap_or_else(|| panic!("`{name}` already declared as a nonterminal"))
    }

    /// Adds a nonterminal whose name collides with nothing already present,
    /// starting from `base` and appending `'` until unique.
    pub fn fresh_nonterminal(&mut self, base: &str) -> Symbol {
        let mut name = base.to_owned();
        while self.by_name.contains_key(&name) {
            name.push('\'');
        }
        self.nonterminal(&name)
    }

    pub fn get(&self, name: &str) -> Option<Symbol> {
        self.by_name.get(name).copied()
    }

    pub fn name(&self, sym: Symbol) -> &str {
        &self.entries[sym.index()].name
    }

    pub fn kind(&self, sym: Symbol) -> SymbolKind {
        self.entries[sym.index()].kind
    }

    pub fn is_terminal(&self, sym: Symbol) -> bool {
        self.kind(sym) == SymbolKind::Terminal
    }

    pub fn is_nonterminal(&self, sym: Symbol) -> bool {
        self.kind(sym) == SymbolKind::Nonterminal
    }

    pub fn contains(&self, sym: Symbol) -> bool {
        sym.index() < self.entries.len()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn symbols(&self) -> impl Iterator<Item = Symbol> + '_ {
        (0..self.entries.len() as u32).map(Symbol)
    }

    pub fn of_kind(&self, kind: SymbolKind) -> impl Iterator<Item = Symbol> + '_ {
        self.symbols().filter(move |&s| self.kind(s) == kind)
    }

    pub fn nonterminals(&self) -> impl Iterator<Item = Symbol> + '_ {
        self.of_kind(SymbolKind::Nonterminal)
    }

    pub fn terminals(&self) -> impl Iterator<Item = Symbol> + '_ {
        self.of_kind(SymbolKind::Terminal)
    }

    /// Resolves whitespace-separated terminal names into a word.
    pub fn parse_word(&self, text: &str) -> Result<Word, UnknownTerminal> {
        text.split_whitespace()
            .map(|name| match self.get(name) {
                Some(sym) if self.is_terminal(sym) => Ok(sym),
                _ => Err(UnknownTerminal(name.to_owned())),
            })
            .collect()
    }

    pub fn render(&self, syms: &[Symbol]) -> String {
        self.display(syms).to_string()
    }

    /// Space-separated names; the empty sequence renders as [`EPSILON_TOKEN`].
    pub fn display<'a>(&'a self, syms: &'a [Symbol]) -> DisplaySymbols<'a> {
        DisplaySymbols { table: self, syms }
    }

    /// Compares two words by length, then by symbol names.
    pub fn shortlex_cmp(&self, a: &[Symbol], b: &[Symbol]) -> std::cmp::Ordering {
        a.len()
            .cmp(&b.len())
            .then_with(|| a.iter().map(|&s| self.name(s)).cmp(b.iter().map(|&s| self.name(s))))
    }
}

/// Tables are equal when they declare the same names with the same kinds in the
/// same per-kind order. Interleaving between kinds is not significant, because
/// the text format lists each alphabet on its own line.
impl PartialEq for SymbolTable {
    fn eq(&self, other: &Self) -> bool {
        let names = |t: &SymbolTable, kind| -> Vec<String> { t.of_kind(kind).map(|s| t.name(s).to_owned()).collect() };
        [SymbolKind::Nonterminal, SymbolKind::Terminal, SymbolKind::Undeclared]
            .into_iter()
            .all(|kind| names(self, kind) == names(other, kind))
    }
}

impl Eq for SymbolTable {}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown terminal `{0}`")]
pub struct UnknownTerminal(pub String);

pub struct DisplaySymbols<'a> {
    table: &'a SymbolTable,
    syms: &'a [Symbol],
}

impl fmt::Display for DisplaySymbols<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.syms.is_empty() {
            return f.write_str(EPSILON_TOKEN);
        }
        for (i, &s) in self.syms.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            f.write_str(self.table.name(s))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kinds_are_disjoint() {
        let mut t = SymbolTable::new();
        let a = t.nonterminal("A");
        assert_eq!(t.intern("A", SymbolKind::Nonterminal), Some(a));
        assert_eq!(t.intern("A", SymbolKind::Terminal), None);
    }

    #[test]
    fn fresh_names_avoid_collisions() {
        let mut t = SymbolTable::new();
        t.nonterminal("A");
        let fresh = t.fresh_nonterminal("A");
        assert_eq!(t.name(fresh), "A'");
    }

    #[test]
    fn equality_ignores_cross_kind_interleaving() {
        let mut a = SymbolTable::new();
        a.nonterminal("S");
        a.terminal("x");
        a.nonterminal("T");
        let mut b = SymbolTable::new();
        b.nonterminal("S");
        b.nonterminal("T");
        b.terminal("x");
        assert_eq!(a, b);
    }

    #[test]
    fn parse_word_rejects_nonterminals() {
        let mut t = SymbolTable::new();
        t.nonterminal("S");
        t.terminal("a");
        assert!(t.parse_word("a a").is_ok());
        assert_eq!(t.parse_word("a S"), Err(UnknownTerminal("S".into())));
        assert_eq!(t.parse_word(""), Ok(vec![]));
    }
}
