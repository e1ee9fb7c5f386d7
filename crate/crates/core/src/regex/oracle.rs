//! Membership by Brzozowski derivatives.
//!
//! Works directly on the expression tree and shares no code with the
//! automata pipeline, so the two can check each other.

use std::rc::Rc;

use super::Regex;

#[derive(Debug, PartialEq, Eq)]
enum Term {
    Empty,
    Eps,
    Lit(char),
    Alt(Rc<Term>, Rc<Term>),
    Cat(Rc<Term>, Rc<Term>),
    Star(Rc<Term>),
}

fn empty() -> Rc<Term> {
    Rc::new(Term::Empty)
}

fn eps() -> Rc<Term> {
    Rc::new(Term::Eps)
}

fn alt(l: Rc<Term>, r: Rc<Term>) -> Rc<Term> {
    match (&*l, &*r) {
        (Term::Empty, _) => r,
        (_, Term::Empty) => l,
        _ if l == r => l,
        _ => Rc::new(Term::Alt(l, r)),
    }
}

fn cat(l: Rc<Term>, r: Rc<Term>) -> Rc<Term> {
    match (&*l, &*r) {
        (Term::Empty, _) | (_, Term::Empty) => empty(),
        (Term::Eps, _) => r,
        (_, Term::Eps) => l,
        _ => Rc::new(Term::Cat(l, r)),
    }
}

fn star(t: Rc<Term>) -> Rc<Term> {
    match &*t {
        Term::Empty | Term::Eps => eps(),
        Term::Star(_) => t,
        _ => Rc::new(Term::Star(t)),
    }
}

fn lower(r: &Regex) -> Rc<Term> {
    match r {
        Regex::Epsilon => eps(),
        Regex::Literal(c) => Rc::new(Term::Lit(*c)),
        Regex::Union(l, r) => alt(lower(l), lower(r)),
        Regex::Concat(l, r) => cat(lower(l), lower(r)),
        Regex::Star(inner) => star(lower(inner)),
    }
}

fn nullable(t: &Term) -> bool {
    match t {
        Term::Empty | Term::Lit(_) => false,
        Term::Eps | Term::Star(_) => true,
        Term::Alt(l, r) => nullable(l) || nullable(r),
        Term::Cat(l, r) => nullable(l) && nullable(r),
    }
}

fn derive(t: &Rc<Term>, c: char) -> Rc<Term> {
    match &**t {
        Term::Empty | Term::Eps => empty(),
        Term::Lit(l) => {
            if *l == c {
                eps()
            } else {
                empty()
            }
        }
        Term::Alt(l, r) => alt(derive(l, c), derive(r, c)),
        Term::Cat(l, r) => {
            let head = cat(derive(l, c), r.clone());
            if nullable(l) {
                alt(head, derive(r, c))
            } else {
                head
            }
        }
        Term::Star(inner) => cat(derive(inner, c), t.clone()),
    }
}

/// Decides `input ∈ L(regex)` by taking one derivative per character and
/// checking nullability of the residual.
pub fn oracle_match(regex: &Regex, input: &str) -> bool {
    let mut term = lower(regex);
    for c in input.chars() {
        term = derive(&term, c);
        if *term == Term::Empty {
            return false;
        }
    }
    nullable(&term)
}
