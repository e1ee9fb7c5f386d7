//! Bottom-up enumeration of distinct languages with minimal-operator
//! representatives.

use std::collections::HashMap;

use rand::Rng;
use rayon::prelude::*;

use super::GenError;
use crate::alphabet::Alphabet;
use crate::automata::{self, CanonicalKey, Dfa, Limits};
use crate::regex::Regex;

/// Candidates evaluated per parallel batch before the sequential merge.
const BATCH: usize = 1 << 15;

#[derive(Debug, Clone)]
pub struct PoolEntry {
    pub key: CanonicalKey,
    pub dfa: Dfa,
    /// Least operator count of any expression for this language.
    pub min_ops: usize,
    /// An expression with exactly `min_ops` operators, chosen uniformly
    /// among all such expressions.
    pub representative: Regex,
    /// Number of distinct `min_ops`-operator expressions for the language.
    pub rep_count_seen: u64,
}

/// All languages expressible with at most `max_ops` operators, grouped by
/// their minimal operator count.
#[derive(Debug, Clone)]
pub struct LanguagePool {
    alphabet: Alphabet,
    max_ops: usize,
    entries: Vec<PoolEntry>,
    index: HashMap<CanonicalKey, usize>,
    levels: Vec<Vec<usize>>,
}

impl LanguagePool {
    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn max_ops(&self) -> usize {
        self.max_ops
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[PoolEntry] {
        &self.entries
    }

    pub fn entry(&self, id: usize) -> &PoolEntry {
        &self.entries[id]
    }

    pub fn find(&self, key: &CanonicalKey) -> Option<&PoolEntry> {
        self.index.get(key).map(|&i| &self.entries[i])
    }

    /// Entry ids whose minimal operator count is `ops`, in discovery order.
    pub fn level(&self, ops: usize) -> &[usize] {
        self.levels.get(ops).map_or(&[], Vec::as_slice)
    }

    pub fn level_sizes(&self) -> Vec<usize> {
        self.levels.iter().map(Vec::len).collect()
    }
}

#[derive(Debug, Clone, Copy)]
enum Op {
    Union(usize, usize),
    Concat(usize, usize),
    Star(usize),
}

/// Reservoir state for a language first reached at the current level.
struct Fresh {
    key: CanonicalKey,
    dfa: Dfa,
    chosen: Op,
    weight: u64,
}

/// Enumerates languages level by level. Level 0 holds `~` and each letter;
/// level `d` combines representatives of levels `i` and `j` with
/// `i + j + 1 = d` by union and concatenation, and stars level `d - 1`.
///
/// Any expression with `d` operators whose language is new at level `d` has
/// minimal children, so combining representatives reaches every such
/// language. The number of minimal expressions per language is tracked as a
/// weight, and representatives are chosen by weighted reservoir sampling so
/// that each minimal expression is equally likely.
pub fn enumerate_languages<R: Rng + ?Sized>(
    max_ops: usize,
    alphabet: &Alphabet,
    limits: Limits,
    rng: &mut R,
) -> Result<LanguagePool, GenError> {
    let mut pool = LanguagePool {
        alphabet: alphabet.clone(),
        max_ops,
        entries: Vec::new(),
        index: HashMap::new(),
        levels: Vec::new(),
    };

    let atoms = std::iter::once(Regex::Epsilon).chain(alphabet.letters().iter().map(|&c| Regex::Literal(c)));
    let mut level0 = Vec::new();
    for atom in atoms {
        let dfa = automata::minimal_dfa_with(&atom, alphabet, limits)?;
        let key = dfa.canonical_key();
        let id = pool.entries.len();
        pool.index.insert(key.clone(), id);
        pool.entries.push(PoolEntry {
            key,
            dfa,
            min_ops: 0,
            representative: atom,
            rep_count_seen: 1,
        });
        level0.push(id);
    }
    pool.levels.push(level0);

    for d in 1..=max_ops {
        let candidates = level_candidates(&pool, d);
        let mut fresh: Vec<Fresh> = Vec::new();
        let mut fresh_index: HashMap<CanonicalKey, usize> = HashMap::new();

        for batch in candidates.chunks(BATCH) {
            let results: Vec<Result<Dfa, GenError>> = batch.par_iter().map(|op| apply(&pool, *op, limits)).collect();
            for (op, result) in batch.iter().zip(results) {
                let dfa = result?;
                let key = dfa.canonical_key();
                if pool.index.contains_key(&key) {
                    continue;
                }
                let weight = op_weight(&pool, *op);
                match fresh_index.get(&key) {
                    Some(&slot) => {
                        let entry = &mut fresh[slot];
                        entry.weight = entry.weight.saturating_add(weight);
                        if rng.gen_range(0..entry.weight) < weight {
                            entry.chosen = *op;
                        }
                    }
                    None => {
                        fresh_index.insert(key.clone(), fresh.len());
                        fresh.push(Fresh {
                            key,
                            dfa,
                            chosen: *op,
                            weight,
                        });
                    }
                }
            }
        }

        let mut level = Vec::with_capacity(fresh.len());
        for f in fresh {
            let representative = build(&pool, f.chosen);
            let id = pool.entries.len();
            pool.index.insert(f.key.clone(), id);
            pool.entries.push(PoolEntry {
                key: f.key,
                dfa: f.dfa,
                min_ops: d,
                representative,
                rep_count_seen: f.weight,
            });
            level.push(id);
        }
        log::debug!(
            "level {d}: {} new languages from {} candidates",
            level.len(),
            candidates.len()
        );
        pool.levels.push(level);
    }
    Ok(pool)
}

fn level_candidates(pool: &LanguagePool, d: usize) -> Vec<Op> {
    let mut out = Vec::new();
    for i in 0..d {
        let j = d - 1 - i;
        for &a in &pool.levels[i] {
            for &b in &pool.levels[j] {
                out.push(Op::Union(a, b));
                out.push(Op::Concat(a, b));
            }
        }
    }
    out.extend(pool.levels[d - 1].iter().map(|&a| Op::Star(a)));
    out
}

fn apply(pool: &LanguagePool, op: Op, limits: Limits) -> Result<Dfa, GenError> {
    let dfa = |i: usize| &pool.entries[i].dfa;
    Ok(match op {
        Op::Union(a, b) => automata::union(dfa(a), dfa(b)),
        Op::Concat(a, b) => automata::concat(dfa(a), dfa(b), limits.max_dfa_states)?,
        Op::Star(a) => automata::star(dfa(a), limits.max_dfa_states)?,
    })
}

fn op_weight(pool: &LanguagePool, op: Op) -> u64 {
    let count = |i: usize| pool.entries[i].rep_count_seen;
    match op {
        Op::Union(a, b) | Op::Concat(a, b) => count(a).saturating_mul(count(b)),
        Op::Star(a) => count(a),
    }
}

fn build(pool: &LanguagePool, op: Op) -> Regex {
    let rep = |i: usize| pool.entries[i].representative.clone();
    match op {
        Op::Union(a, b) => Regex::union(rep(a), rep(b)),
        Op::Concat(a, b) => Regex::concat(rep(a), rep(b)),
        Op::Star(a) => Regex::star(rep(a)),
    }
}
