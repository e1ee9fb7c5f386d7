//! Regex abstract syntax over a finite alphabet.
//!
//! Expressions are built from three kinds of atoms (`~` for the empty string
//! and single letters) and three compositional operators: union `|`,
//! concatenation (juxtaposition) and Kleene star `*`. Star binds tightest,
//! then concatenation, then union; both binary operators associate left.

mod oracle;
mod parse;

use std::collections::BTreeSet;
use std::fmt;

pub use oracle::oracle_match;
pub use parse::{parse, parse_with, SyntaxError, SyntaxErrorKind};

use crate::alphabet::EPSILON_MARKER;

/// A regular expression tree.
///
/// The derived ordering is structural and only used to give sets of
/// sub-expressions a stable iteration order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Regex {
    Epsilon,
    Literal(char),
    Union(Box<Regex>, Box<Regex>),
    Concat(Box<Regex>, Box<Regex>),
    Star(Box<Regex>),
}

/// Set of operator-argument subtrees, deduplicated structurally.
pub type SubExpressionSet = BTreeSet<Regex>;

impl Regex {
    pub fn literal(c: char) -> Regex {
        Regex::Literal(c)
    }

    pub fn union(left: Regex, right: Regex) -> Regex {
        Regex::Union(Box::new(left), Box::new(right))
    }

    pub fn concat(left: Regex, right: Regex) -> Regex {
        Regex::Concat(Box::new(left), Box::new(right))
    }

    pub fn star(inner: Regex) -> Regex {
        Regex::Star(Box::new(inner))
    }

    /// Number of union, concatenation and star nodes. Every binary node
    /// counts once, so `(a|bba)*` has four operators.
    pub fn operator_count(&self) -> usize {
        match self {
            Regex::Epsilon | Regex::Literal(_) => 0,
            Regex::Union(l, r) | Regex::Concat(l, r) => 1 + l.operator_count() + r.operator_count(),
            Regex::Star(inner) => 1 + inner.operator_count(),
        }
    }

    /// Number of letter occurrences (epsilon atoms excluded).
    pub fn literal_count(&self) -> usize {
        match self {
            Regex::Epsilon => 0,
            Regex::Literal(_) => 1,
            Regex::Union(l, r) | Regex::Concat(l, r) => l.literal_count() + r.literal_count(),
            Regex::Star(inner) => inner.literal_count(),
        }
    }

    pub fn is_atom(&self) -> bool {
        matches!(self, Regex::Epsilon | Regex::Literal(_))
    }

    /// Direct operator arguments of this node.
    pub fn children(&self) -> Vec<&Regex> {
        match self {
            Regex::Epsilon | Regex::Literal(_) => Vec::new(),
            Regex::Union(l, r) | Regex::Concat(l, r) => vec![l, r],
            Regex::Star(inner) => vec![inner],
        }
    }

    /// All proper sub-expressions: every subtree that appears as an argument
    /// of some operator. The root itself is not included.
    pub fn subexpressions(&self) -> SubExpressionSet {
        let mut out = BTreeSet::new();
        let mut stack: Vec<&Regex> = self.children();
        while let Some(node) = stack.pop() {
            if out.insert(node.clone()) {
                stack.extend(node.children());
            }
        }
        out
    }

    /// The expression for the reversed language: concatenations swap order.
    pub fn reverse(&self) -> Regex {
        match self {
            Regex::Epsilon | Regex::Literal(_) => self.clone(),
            Regex::Union(l, r) => Regex::union(l.reverse(), r.reverse()),
            Regex::Concat(l, r) => Regex::concat(r.reverse(), l.reverse()),
            Regex::Star(inner) => Regex::star(inner.reverse()),
        }
    }

    /// Whether the empty string belongs to the expressed language.
    pub fn nullable(&self) -> bool {
        match self {
            Regex::Epsilon | Regex::Star(_) => true,
            Regex::Literal(_) => false,
            Regex::Union(l, r) => l.nullable() || r.nullable(),
            Regex::Concat(l, r) => l.nullable() && r.nullable(),
        }
    }

    /// Letter occurrences in left-to-right (pre-order) position.
    pub fn literals(&self) -> Vec<char> {
        fn walk(node: &Regex, out: &mut Vec<char>) {
            match node {
                Regex::Epsilon => {}
                Regex::Literal(c) => out.push(*c),
                Regex::Union(l, r) | Regex::Concat(l, r) => {
                    walk(l, out);
                    walk(r, out);
                }
                Regex::Star(inner) => walk(inner, out),
            }
        }
        let mut out = Vec::new();
        walk(self, &mut out);
        out
    }

    fn precedence(&self) -> u8 {
        match self {
            Regex::Union(..) => 0,
            Regex::Concat(..) => 1,
            Regex::Star(_) => 2,
            Regex::Epsilon | Regex::Literal(_) => 3,
        }
    }

    fn write_at(&self, f: &mut fmt::Formatter<'_>, min_prec: u8) -> fmt::Result {
        if self.precedence() < min_prec {
            f.write_str("(")?;
            self.write_at(f, 0)?;
            return f.write_str(")");
        }
        match self {
            Regex::Epsilon => write!(f, "{EPSILON_MARKER}"),
            Regex::Literal(c) => write!(f, "{c}"),
            Regex::Union(l, r) => {
                l.write_at(f, 0)?;
                f.write_str("|")?;
                r.write_at(f, 1)
            }
            Regex::Concat(l, r) => {
                l.write_at(f, 1)?;
                r.write_at(f, 2)
            }
            Regex::Star(inner) => {
                inner.write_at(f, 2)?;
                f.write_str("*")
            }
        }
    }
}

/// Minimal-parentheses rendering; `parse` inverts it exactly.
impl fmt::Display for Regex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_at(f, 0)
    }
}

impl std::str::FromStr for Regex {
    type Err = SyntaxError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}
