use rand::Rng;
use serde::{Deserialize, Serialize};

use super::dfa::{Dfa, StateId};
use super::AutomataError;

/// `per_length[l]` is the number of accepted words of length exactly `l`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LengthCounts {
    pub per_length: Vec<u64>,
}

impl LengthCounts {
    pub fn total(&self) -> u64 {
        self.per_length.iter().sum()
    }

    pub fn max_len(&self) -> usize {
        self.per_length.len() - 1
    }
}

/// Forward dynamic program: number of words reaching each state, per length.
pub fn count_by_length(dfa: &Dfa, max_len: usize) -> LengthCounts {
    let n = dfa.state_count();
    let mut reach = vec![0u64; n];
    reach[dfa.start() as usize] = 1;
    let mut per_length = Vec::with_capacity(max_len + 1);
    for len in 0..=max_len {
        per_length.push(
            (0..n)
                .filter(|&q| dfa.is_accepting(q as StateId))
                .map(|q| reach[q])
                .sum(),
        );
        if len == max_len {
            break;
        }
        let mut next = vec![0u64; n];
        for (q, &count) in reach.iter().enumerate() {
            if count == 0 {
                continue;
            }
            for s in 0..dfa.alphabet_len() as u8 {
                next[dfa.next(q as StateId, s) as usize] += count;
            }
        }
        reach = next;
    }
    LengthCounts { per_length }
}

/// Backward counting table for ranking and uniform sampling of accepted
/// words: `ways[r][q]` counts accepted words of length `r` read from `q`.
#[derive(Debug, Clone)]
pub struct WordCounter<'a> {
    dfa: &'a Dfa,
    ways: Vec<Vec<u64>>,
}

impl<'a> WordCounter<'a> {
    pub fn new(dfa: &'a Dfa, max_len: usize) -> Self {
        let n = dfa.state_count();
        let mut ways = Vec::with_capacity(max_len + 1);
        ways.push(
            (0..n)
                .map(|q| dfa.is_accepting(q as StateId) as u64)
                .collect::<Vec<_>>(),
        );
        for r in 1..=max_len {
            let prev = &ways[r - 1];
            let row = (0..n as StateId)
                .map(|q| {
                    (0..dfa.alphabet_len() as u8)
                        .map(|s| prev[dfa.next(q, s) as usize])
                        .sum()
                })
                .collect();
            ways.push(row);
        }
        WordCounter { dfa, ways }
    }

    pub fn max_len(&self) -> usize {
        self.ways.len() - 1
    }

    /// Accepted words of exactly `len` letters.
    pub fn count(&self, len: usize) -> u64 {
        self.count_from(len, self.dfa.start())
    }

    /// Accepted words of exactly `len` letters read from state `q`.
    pub fn count_from(&self, len: usize, q: StateId) -> u64 {
        self.ways.get(len).map_or(0, |row| row[q as usize])
    }

    /// The accepted word of length `len` with lexicographic rank `rank`
    /// (letters ordered as in the alphabet). `rank < count(len)`.
    pub fn unrank(&self, len: usize, mut rank: u64) -> Vec<u8> {
        assert!(rank < self.count(len), "rank {rank} out of range for length {len}");
        let mut q = self.dfa.start();
        let mut word = Vec::with_capacity(len);
        for remaining in (0..len).rev() {
            for s in 0..self.dfa.alphabet_len() as u8 {
                let t = self.dfa.next(q, s);
                let below = self.ways[remaining][t as usize];
                if rank < below {
                    word.push(s);
                    q = t;
                    break;
                }
                rank -= below;
            }
        }
        debug_assert_eq!(word.len(), len);
        word
    }

    /// One accepted word of length `len`, uniformly at random.
    pub fn sample<R: Rng + ?Sized>(&self, len: usize, rng: &mut R) -> Result<Vec<u8>, AutomataError> {
        let total = self.count(len);
        if total == 0 {
            return Err(AutomataError::EmptyStratum { length: len });
        }
        Ok(self.unrank(len, rng.gen_range(0..total)))
    }
}

/// Uniformly random accepted word of exactly `length` letters.
pub fn sample_string<R: Rng + ?Sized>(dfa: &Dfa, length: usize, rng: &mut R) -> Result<Vec<u8>, AutomataError> {
    WordCounter::new(dfa, length).sample(length, rng)
}
