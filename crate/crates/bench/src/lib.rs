//! Fixed-seed inputs shared by the criterion benches in `benches/`.

use ppgram_core::reductions::SatInstance;
use ppgram_core::sample::{random_3sat, random_cf_grammar, Shape};
use ppgram_core::{PlainGrammar, Word};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Random context-free grammars paired with one word of length `len` over
/// their alphabet. The word cycles through the terminals.
pub fn cf_cases(count: usize, len: usize) -> Vec<(PlainGrammar, Word)> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    (0..count)
        .map(|_| {
            let g = random_cf_grammar(&mut rng, Shape::default(), 6);
            let ts: Vec<_> = g.symbols.terminals().collect();
            let w = (0..len).map(|i| ts[i % ts.len()]).collect();
            (g, w)
        })
        .collect()
}

pub fn sat_cases(count: usize, max_vars: usize, max_clauses: usize) -> Vec<SatInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    (0..count)
        .map(|_| random_3sat(&mut rng, max_vars, max_clauses))
        .collect()
}
