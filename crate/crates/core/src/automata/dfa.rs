use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};

pub type StateId = u32;

/// Complete deterministic automaton. `delta[q * k + s]` is the successor of
/// state `q` on letter index `s`, for an alphabet of `k` letters.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Dfa {
    alphabet_len: usize,
    start: StateId,
    accepting: Vec<bool>,
    delta: Vec<StateId>,
    minimal: bool,
}

/// Relabelling-invariant identity of a language: the byte encoding of its
/// breadth-first-numbered minimal DFA.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct CanonicalKey(Vec<u8>);

impl CanonicalKey {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn to_hex(&self) -> String {
        hex::encode(&self.0)
    }

    pub fn from_hex(s: &str) -> Result<Self, hex::FromHexError> {
        hex::decode(s).map(CanonicalKey)
    }
}

impl fmt::Display for CanonicalKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

impl From<CanonicalKey> for String {
    fn from(k: CanonicalKey) -> String {
        k.to_hex()
    }
}

impl TryFrom<String> for CanonicalKey {
    type Error = hex::FromHexError;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        CanonicalKey::from_hex(&s)
    }
}

impl Dfa {
    pub(crate) fn from_parts(
        alphabet_len: usize,
        start: StateId,
        accepting: Vec<bool>,
        delta: Vec<StateId>,
        minimal: bool,
    ) -> Dfa {
        debug_assert_eq!(delta.len(), accepting.len() * alphabet_len);
        debug_assert!(delta.iter().all(|&t| (t as usize) < accepting.len()));
        Dfa {
            alphabet_len,
            start,
            accepting,
            delta,
            minimal,
        }
    }

    pub fn state_count(&self) -> usize {
        self.accepting.len()
    }

    pub fn alphabet_len(&self) -> usize {
        self.alphabet_len
    }

    pub fn start(&self) -> StateId {
        self.start
    }

    pub fn is_minimal(&self) -> bool {
        self.minimal
    }

    pub fn is_accepting(&self, state: StateId) -> bool {
        self.accepting[state as usize]
    }

    pub fn next(&self, state: StateId, symbol: u8) -> StateId {
        self.delta[state as usize * self.alphabet_len + symbol as usize]
    }

    /// The letter map `q ↦ δ(q, symbol)` as a vector over states.
    pub fn letter_map(&self, symbol: u8) -> Vec<StateId> {
        (0..self.state_count() as StateId)
            .map(|q| self.next(q, symbol))
            .collect()
    }

    pub fn run_from(&self, state: StateId, word: &[u8]) -> StateId {
        word.iter().fold(state, |q, &s| self.next(q, s))
    }

    pub fn accepts(&self, word: &[u8]) -> bool {
        self.is_accepting(self.run_from(self.start, word))
    }

    /// States visited while reading `word`: the start state followed by the
    /// state after each letter.
    pub fn trace(&self, word: &[u8]) -> Vec<StateId> {
        let mut q = self.start;
        let mut out = Vec::with_capacity(word.len() + 1);
        out.push(q);
        for &s in word {
            q = self.next(q, s);
            out.push(q);
        }
        out
    }

    /// Same automaton with the accepting set inverted. Completeness makes
    /// this exact, and minimality is preserved.
    pub fn complement(&self) -> Dfa {
        Dfa {
            accepting: self.accepting.iter().map(|a| !a).collect(),
            ..self.clone()
        }
    }

    /// Hopcroft partition refinement after dropping unreachable states.
    /// The result is renumbered breadth-first from the start state, visiting
    /// letters in alphabet order.
    pub fn minimize(&self) -> Dfa {
        if self.minimal {
            return self.clone();
        }
        let k = self.alphabet_len;
        let reachable = self.reachable_order();
        let n = reachable.len();
        let mut local = vec![u32::MAX; self.state_count()];
        for (i, &q) in reachable.iter().enumerate() {
            local[q as usize] = i as u32;
        }
        let trans = |q: usize, s: usize| local[self.delta[reachable[q] as usize * k + s] as usize] as usize;

        // predecessors[s][q] = states p with δ(p, s) = q
        let mut predecessors = vec![vec![Vec::<u32>::new(); n]; k];
        for q in 0..n {
            for (s, preds) in predecessors.iter_mut().enumerate() {
                preds[trans(q, s)].push(q as u32);
            }
        }

        let block_of = hopcroft(n, k, |q| self.accepting[reachable[q] as usize], &predecessors);

        let block_count = block_of.iter().max().map_or(0, |&b| b as usize + 1);
        let mut representative = vec![usize::MAX; block_count];
        for (q, &b) in block_of.iter().enumerate() {
            if representative[b as usize] == usize::MAX {
                representative[b as usize] = q;
            }
        }
        let quotient_delta: Vec<StateId> = (0..block_count)
            .flat_map(|b| (0..k).map(move |s| (b, s)))
            .map(|(b, s)| block_of[trans(representative[b], s)])
            .collect();
        let quotient_accepting: Vec<bool> = representative
            .iter()
            .map(|&q| self.accepting[reachable[q] as usize])
            .collect();
        let start = block_of[0];
        let mut out = Dfa::from_parts(k, start, quotient_accepting, quotient_delta, false).renumber_bfs();
        out.minimal = true;
        out
    }

    fn reachable_order(&self) -> Vec<StateId> {
        let mut seen = vec![false; self.state_count()];
        let mut order = vec![self.start];
        seen[self.start as usize] = true;
        let mut cursor = 0;
        while cursor < order.len() {
            let q = order[cursor];
            for s in 0..self.alphabet_len as u8 {
                let t = self.next(q, s);
                if !seen[t as usize] {
                    seen[t as usize] = true;
                    order.push(t);
                }
            }
            cursor += 1;
        }
        order
    }

    /// Keeps reachable states only, numbered in breadth-first discovery order.
    fn renumber_bfs(&self) -> Dfa {
        let order = self.reachable_order();
        let mut id = vec![u32::MAX; self.state_count()];
        for (i, &q) in order.iter().enumerate() {
            id[q as usize] = i as u32;
        }
        let k = self.alphabet_len;
        let delta = order
            .iter()
            .flat_map(|&q| (0..k as u8).map(move |s| (q, s)))
            .map(|(q, s)| id[self.next(q, s) as usize])
            .collect();
        let accepting = order.iter().map(|&q| self.accepting[q as usize]).collect();
        Dfa::from_parts(k, 0, accepting, delta, self.minimal)
    }

    /// Byte encoding of the automaton: letter count, state count, then per
    /// state its acceptance flag and successors. Successor width is 1, 2 or
    /// 4 bytes depending on the state count, which is itself encoded.
    pub fn canonical_key(&self) -> CanonicalKey {
        let minimized;
        let dfa = if self.minimal {
            self
        } else {
            minimized = self.minimize();
            &minimized
        };
        let n = dfa.state_count();
        let width = if n <= 1 << 8 {
            1
        } else if n <= 1 << 16 {
            2
        } else {
            4
        };
        let mut bytes = Vec::with_capacity(5 + n * (1 + width * dfa.alphabet_len));
        bytes.push(dfa.alphabet_len as u8);
        bytes.extend_from_slice(&(n as u32).to_le_bytes());
        for q in 0..n {
            bytes.push(dfa.accepting[q] as u8);
            for s in 0..dfa.alphabet_len {
                let t = dfa.delta[q * dfa.alphabet_len + s];
                match width {
                    1 => bytes.push(t as u8),
                    2 => bytes.extend_from_slice(&(t as u16).to_le_bytes()),
                    _ => bytes.extend_from_slice(&t.to_le_bytes()),
                }
            }
        }
        CanonicalKey(bytes)
    }

    /// Dead states: non-accepting states whose successors are all themselves.
    pub fn is_dead(&self, state: StateId) -> bool {
        !self.is_accepting(state) && (0..self.alphabet_len as u8).all(|s| self.next(state, s) == state)
    }
}

/// Coarsest partition of `0..n` compatible with `accepting` and the
/// transition structure given by `predecessors`. Returns the block of each
/// state.
fn hopcroft(n: usize, k: usize, accepting: impl Fn(usize) -> bool, predecessors: &[Vec<Vec<u32>>]) -> Vec<u32> {
    let mut block_of = vec![0u32; n];
    let mut blocks: Vec<Vec<u32>> = Vec::new();
    let (acc, rej): (Vec<u32>, Vec<u32>) = (0..n as u32).partition(|&q| accepting(q as usize));
    for part in [acc, rej] {
        if !part.is_empty() {
            let b = blocks.len() as u32;
            for &q in &part {
                block_of[q as usize] = b;
            }
            blocks.push(part);
        }
    }

    let mut pending: VecDeque<(u32, usize)> = VecDeque::new();
    let mut queued: Vec<Vec<bool>> = Vec::new();
    let smallest = if blocks.len() == 2 && blocks[1].len() < blocks[0].len() {
        1
    } else {
        0
    };
    queued.resize(blocks.len(), vec![false; k]);
    if !blocks.is_empty() {
        pending.extend((0..k).map(|s| (smallest, s)));
        queued[smallest as usize] = vec![true; k];
    }

    let mut marked = vec![false; n];
    while let Some((splitter, s)) = pending.pop_front() {
        queued[splitter as usize][s] = false;
        let mut touched: Vec<u32> = Vec::new();
        let mut hits: Vec<u32> = Vec::new();
        for &q in &blocks[splitter as usize] {
            for &p in &predecessors[s][q as usize] {
                if !marked[p as usize] {
                    marked[p as usize] = true;
                    hits.push(p);
                    let b = block_of[p as usize];
                    if !touched.contains(&b) {
                        touched.push(b);
                    }
                }
            }
        }
        for b in touched {
            let (inside, outside): (Vec<u32>, Vec<u32>) = blocks[b as usize].iter().partition(|&&q| marked[q as usize]);
            if outside.is_empty() {
                continue;
            }
            let new_block = blocks.len() as u32;
            let (keep, moved) = if inside.len() <= outside.len() {
                (outside, inside)
            } else {
                (inside, outside)
            };
            for &q in &moved {
                block_of[q as usize] = new_block;
            }
            blocks[b as usize] = keep;
            blocks.push(moved);
            // `moved` is the smaller half: queueing it suffices whether or
            // not `b` is still pending
            queued.push(vec![true; k]);
            pending.extend((0..k).map(|c| (new_block, c)));
        }
        for p in hits {
            marked[p as usize] = false;
        }
    }
    block_of
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::Alphabet;
    use crate::automata::minimal_dfa;
    use crate::regex::parse;

    fn dfa(r: &str) -> Dfa {
        minimal_dfa(&parse(r).unwrap(), &Alphabet::binary()).unwrap()
    }

    fn w(s: &str) -> Vec<u8> {
        Alphabet::binary().encode(s).unwrap()
    }

    #[test]
    fn star_of_a_has_two_states() {
        let d = dfa("a*");
        assert_eq!(d.state_count(), 2);
        assert!(d.is_accepting(0));
        assert_eq!(d.next(0, 0), 0);
        assert!(d.is_dead(d.next(0, 1)));
    }

    #[test]
    fn minimize_is_idempotent() {
        for r in ["(a|bba)*", "b|(a|(a|b)b)*", "(b(a|b))*a*"] {
            let once = dfa(r);
            let mut twice = once.clone();
            twice.minimal = false;
            assert_eq!(twice.minimize(), once);
        }
    }

    #[test]
    fn accepts_examples() {
        let d = dfa("(ab)*");
        assert!(d.accepts(&w("abab")));
        assert!(!d.accepts(&w("aabab")));
        assert!(d.accepts(&[]));
        assert!(!dfa("a").accepts(&[]));
    }

    #[test]
    fn complement_flips_membership() {
        let d = dfa("a*|b");
        let c = d.complement();
        assert!(!c.accepts(&w("aaa")));
        assert!(c.accepts(&w("ab")));
        assert_eq!(c.complement(), d);
    }

    #[test]
    fn trace_records_start_and_every_step() {
        let d = dfa("a*b");
        assert_eq!(d.trace(&w("aab")), vec![0, 0, 0, 1]);
        assert_eq!(d.trace(&[]), vec![0]);
    }

    #[test]
    fn key_hex_round_trip() {
        let key = dfa("(a|b)*b").canonical_key();
        assert_eq!(CanonicalKey::from_hex(&key.to_hex()).unwrap(), key);
    }
}
