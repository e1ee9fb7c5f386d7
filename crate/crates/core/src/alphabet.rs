use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Marker for the empty string inside regex text.
pub const EPSILON_MARKER: char = '~';

/// Characters that are part of the regex syntax and can never be letters.
const RESERVED: &[char] = &['|', '*', '(', ')', EPSILON_MARKER];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlphabetError {
    #[error("alphabet must contain at least one letter")]
    Empty,
    #[error("alphabet letter {0:?} is reserved or not a printable non-space character")]
    InvalidLetter(char),
    #[error("alphabet letter {0:?} appears twice")]
    Duplicate(char),
    #[error("alphabet has more than 255 letters")]
    TooLarge,
    #[error("character {found:?} at position {position} is not in the alphabet")]
    ForeignCharacter { found: char, position: usize },
}

/// An ordered finite set of letters.
///
/// Automata index their transition tables by letter position, so the order
/// of the alphabet fixes the order in which canonical renumbering and string
/// unranking visit letters.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Alphabet {
    letters: Vec<char>,
}

impl Alphabet {
    pub fn new(letters: &str) -> Result<Self, AlphabetError> {
        let mut out: Vec<char> = Vec::new();
        for c in letters.chars() {
            if RESERVED.contains(&c) || c.is_whitespace() || c.is_control() {
                return Err(AlphabetError::InvalidLetter(c));
            }
            if out.contains(&c) {
                return Err(AlphabetError::Duplicate(c));
            }
            out.push(c);
        }
        if out.is_empty() {
            return Err(AlphabetError::Empty);
        }
        if out.len() > u8::MAX as usize {
            return Err(AlphabetError::TooLarge);
        }
        Ok(Alphabet { letters: out })
    }

    /// The binary alphabet `{a, b}`.
    pub fn binary() -> Self {
        Alphabet {
            letters: vec!['a', 'b'],
        }
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn letters(&self) -> &[char] {
        &self.letters
    }

    pub fn contains(&self, c: char) -> bool {
        self.letters.contains(&c)
    }

    pub fn index_of(&self, c: char) -> Option<u8> {
        self.letters.iter().position(|&l| l == c).map(|i| i as u8)
    }

    pub fn letter(&self, index: u8) -> char {
        self.letters[index as usize]
    }

    /// Converts text into letter indices.
    pub fn encode(&self, text: &str) -> Result<Vec<u8>, AlphabetError> {
        text.chars()
            .enumerate()
            .map(|(position, c)| {
                self.index_of(c)
                    .ok_or(AlphabetError::ForeignCharacter { found: c, position })
            })
            .collect()
    }

    pub fn decode(&self, word: &[u8]) -> String {
        word.iter().map(|&i| self.letter(i)).collect()
    }

    /// Every word of length exactly `len`, in lexicographic letter order.
    pub fn words_of_length(&self, len: usize) -> impl Iterator<Item = Vec<u8>> + '_ {
        let k = self.len() as u64;
        let total = k.checked_pow(len as u32).expect("word space overflows u64");
        (0..total).map(move |mut rank| {
            let mut word = vec![0u8; len];
            for slot in word.iter_mut().rev() {
                *slot = (rank % k) as u8;
                rank /= k;
            }
            word
        })
    }

    /// Every word of length at most `max_len`, shortest first.
    pub fn words_up_to(&self, max_len: usize) -> impl Iterator<Item = Vec<u8>> + '_ {
        (0..=max_len).flat_map(move |len| self.words_of_length(len))
    }
}

impl Default for Alphabet {
    fn default() -> Self {
        Alphabet::binary()
    }
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.letters {
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl From<Alphabet> for String {
    fn from(a: Alphabet) -> String {
        a.to_string()
    }
}

impl TryFrom<String> for Alphabet {
    type Error = AlphabetError;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        Alphabet::new(&s)
    }
}

impl std::str::FromStr for Alphabet {
    type Err = AlphabetError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Alphabet::new(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_reserved_and_duplicates() {
        assert_eq!(Alphabet::new("a|"), Err(AlphabetError::InvalidLetter('|')));
        assert_eq!(Alphabet::new("aba"), Err(AlphabetError::Duplicate('a')));
        assert_eq!(Alphabet::new(""), Err(AlphabetError::Empty));
        assert_eq!(Alphabet::new("a b"), Err(AlphabetError::InvalidLetter(' ')));
    }

    #[test]
    fn encode_decode() {
        let ab = Alphabet::binary();
        assert_eq!(ab.encode("abba").unwrap(), vec![0, 1, 1, 0]);
        assert_eq!(ab.decode(&[1, 0]), "ba");
        assert_eq!(
            ab.encode("abc"),
            Err(AlphabetError::ForeignCharacter {
                found: 'c',
                position: 2
            })
        );
        assert_eq!(ab.encode("").unwrap(), Vec::<u8>::new());
    }

    #[test]
    fn word_enumeration_counts() {
        let ab = Alphabet::binary();
        assert_eq!(ab.words_up_to(3).count(), 15);
        let two: Vec<String> = ab.words_of_length(2).map(|w| ab.decode(&w)).collect();
        assert_eq!(two, ["aa", "ab", "ba", "bb"]);
        assert_eq!(ab.words_of_length(0).count(), 1);
    }
}
