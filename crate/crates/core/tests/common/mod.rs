#![allow(dead_code)]

use proptest::prelude::*;
use regset::{Alphabet, Regex};

pub fn ab() -> Alphabet {
    Alphabet::binary()
}

pub fn re(text: &str) -> Regex {
    regset::parse(text).unwrap_or_else(|e| panic!("{text}: {e}"))
}

pub fn arb_regex() -> impl Strategy<Value = Regex> {
    let leaf = prop_oneof![
        Just(Regex::Epsilon),
        Just(Regex::literal('a')),
        Just(Regex::literal('b'))
    ];
    leaf.prop_recursive(4, 12, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Regex::union(l, r)),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Regex::concat(l, r)),
            inner.prop_map(Regex::star),
        ]
    })
}

/// Every syntax tree over {~, a, b} with exactly `ops` operators.
pub fn trees_with(ops: usize) -> Vec<Regex> {
    let mut by_ops: Vec<Vec<Regex>> = vec![vec![Regex::Epsilon, Regex::literal('a'), Regex::literal('b')]];
    for d in 1..=ops {
        let mut level = Vec::new();
        for i in 0..d {
            let j = d - 1 - i;
            for l in &by_ops[i] {
                for r in &by_ops[j] {
                    level.push(Regex::union(l.clone(), r.clone()));
                    level.push(Regex::concat(l.clone(), r.clone()));
                }
            }
        }
        level.extend(by_ops[d - 1].iter().cloned().map(Regex::star));
        by_ops.push(level);
    }
    by_ops.swap_remove(ops)
}

/// Membership of every string of length at most `max_len`, in length-lex order.
pub fn oracle_signature(regex: &Regex, max_len: usize) -> Vec<bool> {
    let alphabet = ab();
    alphabet
        .words_up_to(max_len)
        .map(|w| regset::regex::oracle_match(regex, &alphabet.decode(&w)))
        .collect()
}
