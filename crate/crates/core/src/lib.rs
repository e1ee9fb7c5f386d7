//! Regular-expression membership tasks for a synthetic instruction-learning
//! environment.
//!
//! The crate enumerates regular expressions over a small alphabet, computes
//! hardness attributes for expressions and (expression, string) instances,
//! generates seeded dataset splits, and scores prediction files with
//! per-expression metrics.

pub mod alphabet;
pub mod attributes;
pub mod automata;
pub mod evalkit;
pub mod genset;
pub mod regex;

pub use alphabet::Alphabet;
pub use regex::{parse, Regex};
