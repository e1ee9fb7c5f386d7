use std::fmt;

use thiserror::Error;

use super::Regex;
use crate::alphabet::{Alphabet, EPSILON_MARKER};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SyntaxErrorKind {
    /// A `(` without its `)`, or a `)` without its `(`.
    UnbalancedParen,
    /// A `*` with nothing to apply to.
    DanglingStar,
    /// An empty alternative: empty input, `()`, `a|`, `|a`, `a||b`.
    EmptyBranch,
    /// A character that is neither syntax nor an alphabet letter.
    ForeignCharacter(char),
}

impl fmt::Display for SyntaxErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SyntaxErrorKind::UnbalancedParen => f.write_str("unbalanced parenthesis"),
            SyntaxErrorKind::DanglingStar => f.write_str("'*' has no operand"),
            SyntaxErrorKind::EmptyBranch => f.write_str("empty alternative"),
            SyntaxErrorKind::ForeignCharacter(c) => write!(f, "unexpected character {c:?}"),
        }
    }
}

/// A parse failure at a character position (0-based).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at position {position}: {kind}")]
pub struct SyntaxError {
    pub position: usize,
    pub kind: SyntaxErrorKind,
}

/// Parses a regex over the binary alphabet `{a, b}`.
pub fn parse(text: &str) -> Result<Regex, SyntaxError> {
    parse_with(text, &Alphabet::binary())
}

/// Parses a regex whose letters must come from `alphabet`.
pub fn parse_with(text: &str, alphabet: &Alphabet) -> Result<Regex, SyntaxError> {
    let mut parser = Parser {
        chars: text.chars().collect(),
        pos: 0,
        alphabet,
    };
    let ast = parser.union()?;
    match parser.peek() {
        None => Ok(ast),
        Some(')') => Err(parser.error(SyntaxErrorKind::UnbalancedParen)),
        // union() only stops at ')' or end of input
        Some(_) => unreachable!("parser stopped early"),
    }
}

struct Parser<'a> {
    chars: Vec<char>,
    pos: usize,
    alphabet: &'a Alphabet,
}

impl Parser<'_> {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn error(&self, kind: SyntaxErrorKind) -> SyntaxError {
        SyntaxError {
            position: self.pos,
            kind,
        }
    }

    fn union(&mut self) -> Result<Regex, SyntaxError> {
        let mut left = self.concat()?;
        while self.peek() == Some('|') {
            self.pos += 1;
            let right = self.concat()?;
            left = Regex::union(left, right);
        }
        Ok(left)
    }

    fn concat(&mut self) -> Result<Regex, SyntaxError> {
        let mut acc: Option<Regex> = None;
        loop {
            match self.peek() {
                None | Some('|') | Some(')') => break,
                Some(_) => {
                    let next = self.postfix()?;
                    acc = Some(match acc {
                        None => next,
                        Some(left) => Regex::concat(left, next),
                    });
                }
            }
        }
        acc.ok_or_else(|| self.error(SyntaxErrorKind::EmptyBranch))
    }

    fn postfix(&mut self) -> Result<Regex, SyntaxError> {
        let mut node = self.atom()?;
        while self.peek() == Some('*') {
            self.pos += 1;
            node = Regex::star(node);
        }
        Ok(node)
    }

    fn atom(&mut self) -> Result<Regex, SyntaxError> {
        let c = self.peek().expect("atom called at end of input");
        match c {
            '(' => {
                let open = self.pos;
                self.pos += 1;
                let inner = self.union()?;
                if self.peek() != Some(')') {
                    return Err(SyntaxError {
                        position: open,
                        kind: SyntaxErrorKind::UnbalancedParen,
                    });
                }
                self.pos += 1;
                Ok(inner)
            }
            '*' => Err(self.error(SyntaxErrorKind::DanglingStar)),
            EPSILON_MARKER => {
                self.pos += 1;
                Ok(Regex::Epsilon)
            }
            c if self.alphabet.contains(c) => {
                self.pos += 1;
                Ok(Regex::Literal(c))
            }
            c => Err(self.error(SyntaxErrorKind::ForeignCharacter(c))),
        }
    }
}
