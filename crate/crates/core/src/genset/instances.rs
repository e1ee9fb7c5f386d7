//! Balanced, length-stratified string sampling for one expression.

use std::collections::HashMap;

use rand::seq::index;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::GenError;
use crate::alphabet::Alphabet;
use crate::automata::{Dfa, StateId, WordCounter};

/// One `(regex, string, label)` triple.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Instance {
    pub regex: String,
    pub string: String,
    pub label: bool,
}

/// Counts and ranks the words of one class (members or non-members) whose
/// execution-state count exceeds `es_floor`.
///
/// With `es_floor == 0` every word qualifies and this is a thin wrapper over
/// [`WordCounter`]. Otherwise the walk tracks the set of visited states
/// until it grows past the floor, after which plain path counts take over.
pub struct ClassCounter<'a> {
    dfa: &'a Dfa,
    words: WordCounter<'a>,
    es_floor: usize,
    memo: HashMap<(usize, StateId, u128), u64>,
}

const SATURATED: u128 = u128::MAX;

impl<'a> ClassCounter<'a> {
    /// `class_dfa` accepts exactly the class (pass the complement for
    /// non-members).
    pub fn new(class_dfa: &'a Dfa, es_floor: usize, max_len: usize) -> Result<Self, GenError> {
        if es_floor > 0 && class_dfa.state_count() > 128 {
            return Err(GenError::TooManyStates {
                states: class_dfa.state_count(),
            });
        }
        Ok(ClassCounter {
            dfa: class_dfa,
            words: WordCounter::new(class_dfa, max_len),
            es_floor,
            memo: HashMap::new(),
        })
    }

    fn advance(&self, mask: u128, q: StateId) -> u128 {
        if mask == SATURATED {
            return SATURATED;
        }
        let next = mask | 1u128 << q;
        if next.count_ones() as usize > self.es_floor {
            SATURATED
        } else {
            next
        }
    }

    fn ways(&mut self, remaining: usize, q: StateId, mask: u128) -> u64 {
        if mask == SATURATED {
            return self.words.count_from(remaining, q);
        }
        if remaining == 0 {
            return 0;
        }
        if let Some(&hit) = self.memo.get(&(remaining, q, mask)) {
            return hit;
        }
        let mut total = 0;
        for s in 0..self.dfa.alphabet_len() as u8 {
            let t = self.dfa.next(q, s);
            let next = self.advance(mask, t);
            total += self.ways(remaining - 1, t, next);
        }
        self.memo.insert((remaining, q, mask), total);
        total
    }

    fn start_mask(&self) -> u128 {
        self.advance(0, self.dfa.start())
    }

    pub fn count(&mut self, len: usize) -> u64 {
        let (q, mask) = (self.dfa.start(), self.start_mask());
        self.ways(len, q, mask)
    }

    pub fn counts(&mut self, max_len: usize) -> Vec<u64> {
        (0..=max_len).map(|len| self.count(len)).collect()
    }

    /// Qualifying word of length `len` with lexicographic rank `rank`.
    pub fn unrank(&mut self, len: usize, mut rank: u64) -> Vec<u8> {
        let mut q = self.dfa.start();
        let mut mask = self.start_mask();
        let mut word = Vec::with_capacity(len);
        for remaining in (0..len).rev() {
            let mut moved = false;
            for s in 0..self.dfa.alphabet_len() as u8 {
                let t = self.dfa.next(q, s);
                let next = self.advance(mask, t);
                let below = self.ways(remaining, t, next);
                if rank < below {
                    word.push(s);
                    q = t;
                    mask = next;
                    moved = true;
                    break;
                }
                rank -= below;
            }
            assert!(moved, "rank out of range");
        }
        word
    }
}

/// How many members and non-members to draw for one expression.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClassPlan {
    pub positives: usize,
    pub negatives: usize,
}

impl ClassPlan {
    pub fn total(&self) -> usize {
        self.positives + self.negatives
    }

    /// `n` strings with the minority class taking up to half: the minority
    /// quota is `min(|minority|, n / 2)` and the majority fills the rest.
    pub fn as_balanced_as_possible(positives: u64, negatives: u64, n: usize) -> Result<ClassPlan, GenError> {
        if positives + negatives < n as u64 {
            return Err(GenError::DegenerateLanguage {
                available: positives + negatives,
                requested: n,
            });
        }
        let minority_quota = positives.min(negatives).min(n as u64 / 2) as usize;
        Ok(if positives <= negatives {
            ClassPlan {
                positives: minority_quota,
                negatives: n - minority_quota,
            }
        } else {
            ClassPlan {
                positives: n - minority_quota,
                negatives: minority_quota,
            }
        })
    }

    /// `min(|P|, |N|, cap)` strings split evenly, the odd one positive.
    pub fn balanced(positives: u64, negatives: u64, cap: usize) -> ClassPlan {
        let m = positives.min(negatives).min(cap as u64) as usize;
        ClassPlan {
            positives: m.div_ceil(2),
            negatives: m / 2,
        }
    }
}

/// Picks how many words of each length to draw: one length at a time,
/// uniformly among lengths that still have unused words, so sparse lengths
/// give their shortfall to the others.
pub fn allocate_lengths<R: Rng + ?Sized>(counts: &[u64], quota: usize, rng: &mut R) -> Vec<usize> {
    let mut alloc = vec![0usize; counts.len()];
    let mut open: Vec<usize> = (0..counts.len()).filter(|&l| counts[l] > 0).collect();
    for _ in 0..quota {
        assert!(!open.is_empty(), "quota exceeds available words");
        let slot = rng.gen_range(0..open.len());
        let len = open[slot];
        alloc[len] += 1;
        if alloc[len] as u64 == counts[len] {
            open.swap_remove(slot);
        }
    }
    alloc
}

/// Draws `quota` distinct qualifying words, lengths spread by
/// [`allocate_lengths`] and uniform without replacement within a length.
pub fn draw_class<R: Rng + ?Sized>(
    counter: &mut ClassCounter<'_>,
    quota: usize,
    max_len: usize,
    rng: &mut R,
) -> Vec<Vec<u8>> {
    let counts = counter.counts(max_len);
    let alloc = allocate_lengths(&counts, quota, rng);
    let mut out = Vec::with_capacity(quota);
    for (len, &k) in alloc.iter().enumerate() {
        if k == 0 {
            continue;
        }
        let ranks = index::sample(rng, counts[len] as usize, k);
        for rank in ranks.iter() {
            out.push(counter.unrank(len, rank as u64));
        }
    }
    out
}

/// Word supply for one expression, split by class.
pub struct InstanceSource<'a> {
    pub positives: ClassCounter<'a>,
    pub negatives: ClassCounter<'a>,
    max_len: usize,
}

impl<'a> InstanceSource<'a> {
    /// `dfa` and `complement` must accept complementary languages.
    pub fn new(dfa: &'a Dfa, complement: &'a Dfa, es_floor: usize, max_len: usize) -> Result<Self, GenError> {
        Ok(InstanceSource {
            positives: ClassCounter::new(dfa, es_floor, max_len)?,
            negatives: ClassCounter::new(complement, es_floor, max_len)?,
            max_len,
        })
    }

    /// Qualifying members and non-members of length at most `max_len`.
    pub fn totals(&mut self) -> (u64, u64) {
        let max_len = self.max_len;
        (
            self.positives.counts(max_len).iter().sum(),
            self.negatives.counts(max_len).iter().sum(),
        )
    }

    /// Draws according to `plan` and returns the instances shuffled.
    pub fn draw<R: Rng + ?Sized>(
        &mut self,
        regex: &str,
        alphabet: &Alphabet,
        plan: ClassPlan,
        rng: &mut R,
    ) -> Vec<Instance> {
        let max_len = self.max_len;
        let pos = draw_class(&mut self.positives, plan.positives, max_len, rng);
        let neg = draw_class(&mut self.negatives, plan.negatives, max_len, rng);
        let mut out: Vec<Instance> = pos
            .into_iter()
            .map(|w| (w, true))
            .chain(neg.into_iter().map(|w| (w, false)))
            .map(|(w, label)| Instance {
                regex: regex.to_string(),
                string: alphabet.decode(&w),
                label,
            })
            .collect();
        out.shuffle(rng);
        out
    }
}

/// `n` labelled strings of length at most `max_len` for one expression,
/// balanced as far as the language allows.
pub fn sample_instances<R: Rng + ?Sized>(
    regex: &str,
    dfa: &Dfa,
    alphabet: &Alphabet,
    n: usize,
    max_len: usize,
    rng: &mut R,
) -> Result<Vec<Instance>, GenError> {
    let complement = dfa.complement();
    let mut source = InstanceSource::new(dfa, &complement, 0, max_len)?;
    let (p, q) = source.totals();
    let plan = ClassPlan::as_balanced_as_possible(p, q, n)?;
    Ok(source.draw(regex, alphabet, plan, rng))
}
