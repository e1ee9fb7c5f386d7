//! Finite automata for the expressed languages.
//!
//! The pipeline is `Regex → Nfa` (Thompson construction) `→ Dfa` (subset
//! construction) `→ minimal Dfa` (Hopcroft refinement). Minimal automata are
//! always complete and numbered breadth-first from the start state, so two
//! expressions denote the same language exactly when their minimal automata
//! are equal, and [`CanonicalKey`] is just a byte encoding of that table.

mod counting;
mod dfa;
mod monoid;
mod nfa;
mod ops;

use thiserror::Error;

pub use counting::{count_by_length, sample_string, LengthCounts, WordCounter};
pub use dfa::{CanonicalKey, Dfa, StateId};
pub use monoid::is_starfree;
pub use nfa::{Nfa, Transition};
pub use ops::{concat, star, union};

use crate::alphabet::Alphabet;
use crate::regex::Regex;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AutomataError {
    #[error("subset construction exceeded {limit} states")]
    StateBudgetExceeded { limit: usize },
    #[error("transition monoid exceeded {limit} elements")]
    MonoidBudgetExceeded { limit: usize },
    #[error("no accepted string of length {length}")]
    EmptyStratum { length: usize },
    #[error("letter {0:?} is not in the alphabet")]
    ForeignLetter(char),
}

/// Safety caps for the exponential steps. Default-scale inputs stay far below
/// both defaults.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub max_dfa_states: usize,
    pub max_monoid_size: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_dfa_states: 4096,
            max_monoid_size: 1_000_000,
        }
    }
}

/// Compiles an expression straight to its minimal complete DFA.
pub fn minimal_dfa(regex: &Regex, alphabet: &Alphabet) -> Result<Dfa, AutomataError> {
    minimal_dfa_with(regex, alphabet, Limits::default())
}

pub fn minimal_dfa_with(regex: &Regex, alphabet: &Alphabet, limits: Limits) -> Result<Dfa, AutomataError> {
    let nfa = Nfa::thompson(regex, alphabet)?;
    Ok(nfa.determinize(limits.max_dfa_states)?.minimize())
}
