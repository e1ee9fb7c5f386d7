//! Hardness attributes at language, expression and instance level.
//!
//! Language-level attributes (star-freeness, size, minimal DFA size) depend
//! only on the language and are computed from the minimal DFA. Expression
//! level attributes (composition, sub-expressions) depend on the tree.
//! Instance level attributes (execution states, ambiguity) also depend on
//! the string being recognised.

use serde::{Serialize, Serializer};

use crate::alphabet::Alphabet;
use crate::automata::{self, AutomataError, CanonicalKey, Dfa, Limits, Nfa};
use crate::regex::{Regex, SubExpressionSet};

/// Strings longer than this do not count towards the size attribute.
pub const SIZE_MAX_LEN: usize = 14;

/// Number of member strings of length at most [`SIZE_MAX_LEN`].
pub fn language_size(dfa: &Dfa) -> u64 {
    automata::count_by_length(dfa, SIZE_MAX_LEN).total()
}

/// Distinct minimal-DFA states visited while reading `word`, counting the
/// start state and the state after the last letter.
pub fn execution_states(dfa: &Dfa, word: &[u8]) -> usize {
    let mut visited = vec![false; dfa.state_count()];
    let mut distinct = 0;
    for q in dfa.trace(word) {
        if !std::mem::replace(&mut visited[q as usize], true) {
            distinct += 1;
        }
    }
    distinct
}

/// Forward and backward raw scores and their minimum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Ambiguity {
    pub forward: usize,
    pub backward: usize,
    pub value: usize,
}

/// Largest number of letter occurrences a single input letter can refer to
/// while reading `word` left to right, and right to left on the reversed
/// expression; the smaller of the two.
pub fn ambiguity(regex: &Regex, word: &[u8], alphabet: &Alphabet) -> Result<Ambiguity, AutomataError> {
    let forward = max_active(&Nfa::thompson(regex, alphabet)?, word);
    let reversed_word: Vec<u8> = word.iter().rev().copied().collect();
    let backward = max_active(&Nfa::thompson(&regex.reverse(), alphabet)?, &reversed_word);
    Ok(Ambiguity {
        forward,
        backward,
        value: forward.min(backward),
    })
}

fn max_active(nfa: &Nfa, word: &[u8]) -> usize {
    nfa.active_positions(word).into_iter().max().unwrap_or(0)
}

/// Every expression in `train` together with all of its sub-expressions.
pub fn covered_subexpressions<'a>(train: impl IntoIterator<Item = &'a Regex>) -> SubExpressionSet {
    let mut covered = SubExpressionSet::new();
    for t in train {
        covered.insert(t.clone());
        covered.extend(t.subexpressions());
    }
    covered
}

/// Sub-expressions of `regex` that appear nowhere in `train` (neither as a
/// training expression nor inside one). Comparison is structural.
pub fn unseen_subexpressions<'a>(regex: &Regex, train: impl IntoIterator<Item = &'a Regex>) -> SubExpressionSet {
    unseen_against(regex, &covered_subexpressions(train))
}

pub fn unseen_against(regex: &Regex, covered: &SubExpressionSet) -> SubExpressionSet {
    regex
        .subexpressions()
        .into_iter()
        .filter(|s| !covered.contains(s))
        .collect()
}

fn display<T: std::fmt::Display, S: Serializer>(value: &T, serializer: S) -> Result<S::Ok, S::Error> {
    serializer.collect_str(value)
}

/// Per-expression attributes.
#[derive(Debug, Clone, Serialize)]
pub struct RegexAttributes {
    #[serde(serialize_with = "display")]
    pub regex: Regex,
    pub canonical: CanonicalKey,
    pub starfree: bool,
    pub size: u64,
    pub compositions: usize,
    pub dfa_states: usize,
    #[serde(skip)]
    pub dfa: Dfa,
}

/// Per-(expression, string) attributes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct InstanceAttributes {
    pub es: usize,
    pub ambiguity: usize,
    pub length: usize,
    pub label: bool,
}

pub fn attribute_regex(regex: &Regex, alphabet: &Alphabet, limits: Limits) -> Result<RegexAttributes, AutomataError> {
    let dfa = automata::minimal_dfa_with(regex, alphabet, limits)?;
    attribute_with_dfa(regex, dfa, limits)
}

/// Same as [`attribute_regex`] when the minimal DFA is already known.
pub fn attribute_with_dfa(regex: &Regex, dfa: Dfa, limits: Limits) -> Result<RegexAttributes, AutomataError> {
    let dfa = dfa.minimize();
    Ok(RegexAttributes {
        regex: regex.clone(),
        canonical: dfa.canonical_key(),
        starfree: automata::is_starfree(&dfa, limits.max_monoid_size)?,
        size: language_size(&dfa),
        compositions: regex.operator_count(),
        dfa_states: dfa.state_count(),
        dfa,
    })
}

pub fn attribute_instance(
    attrs: &RegexAttributes,
    word: &[u8],
    alphabet: &Alphabet,
) -> Result<InstanceAttributes, AutomataError> {
    Ok(InstanceAttributes {
        es: execution_states(&attrs.dfa, word),
        ambiguity: ambiguity(&attrs.regex, word, alphabet)?.value,
        length: word.len(),
        label: attrs.dfa.accepts(word),
    })
}
