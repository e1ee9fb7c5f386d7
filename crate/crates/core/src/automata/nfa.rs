use std::collections::HashMap;

use super::dfa::{Dfa, StateId};
use super::AutomataError;
use crate::alphabet::Alphabet;
use crate::regex::Regex;

/// A letter-labelled edge. `position` names the letter occurrence of the
/// source expression (pre-order index) when the automaton came from one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Transition {
    pub symbol: u8,
    pub target: StateId,
    pub position: Option<u32>,
}

/// Nondeterministic automaton with ε-edges.
#[derive(Debug, Clone)]
pub struct Nfa {
    alphabet_len: usize,
    start: StateId,
    accepting: Vec<bool>,
    epsilon: Vec<Vec<StateId>>,
    moves: Vec<Vec<Transition>>,
}

/// Half-built automaton piece: entry state has no incoming edges and exit
/// state has no outgoing edges (a lone epsilon state is both).
#[derive(Clone, Copy)]
struct Fragment {
    start: StateId,
    end: StateId,
}

impl Nfa {
    pub(crate) fn with_states(alphabet_len: usize, count: usize, start: StateId) -> Nfa {
        Nfa {
            alphabet_len,
            start,
            accepting: vec![false; count],
            epsilon: vec![Vec::new(); count],
            moves: vec![Vec::new(); count],
        }
    }

    pub(crate) fn add_state(&mut self) -> StateId {
        self.accepting.push(false);
        self.epsilon.push(Vec::new());
        self.moves.push(Vec::new());
        (self.accepting.len() - 1) as StateId
    }

    pub(crate) fn add_epsilon(&mut self, from: StateId, to: StateId) {
        self.epsilon[from as usize].push(to);
    }

    pub(crate) fn add_move(&mut self, from: StateId, symbol: u8, target: StateId, position: Option<u32>) {
        self.moves[from as usize].push(Transition {
            symbol,
            target,
            position,
        });
    }

    pub(crate) fn set_accepting(&mut self, state: StateId, accepting: bool) {
        self.accepting[state as usize] = accepting;
    }

    pub(crate) fn set_start(&mut self, state: StateId) {
        self.start = state;
    }

    /// Thompson construction. Every letter occurrence yields exactly one
    /// labelled transition, tagged with the occurrence's pre-order index.
    ///
    /// Size: `2·letters + epsilons + unions + 2·stars` states, which never
    /// exceeds `2 + 2·operators + 2·letters`.
    pub fn thompson(regex: &Regex, alphabet: &Alphabet) -> Result<Nfa, AutomataError> {
        let mut nfa = Nfa::with_states(alphabet.len(), 0, 0);
        let mut next_position = 0u32;
        let frag = nfa.build(regex, alphabet, &mut next_position)?;
        nfa.start = frag.start;
        nfa.accepting[frag.end as usize] = true;
        Ok(nfa)
    }

    fn build(
        &mut self,
        regex: &Regex,
        alphabet: &Alphabet,
        next_position: &mut u32,
    ) -> Result<Fragment, AutomataError> {
        Ok(match regex {
            Regex::Epsilon => {
                let s = self.add_state();
                Fragment { start: s, end: s }
            }
            Regex::Literal(c) => {
                let symbol = alphabet.index_of(*c).ok_or(AutomataError::ForeignLetter(*c))?;
                let s = self.add_state();
                let e = self.add_state();
                self.add_move(s, symbol, e, Some(*next_position));
                *next_position += 1;
                Fragment { start: s, end: e }
            }
            Regex::Concat(l, r) => {
                let left = self.build(l, alphabet, next_position)?;
                let right = self.build(r, alphabet, next_position)?;
                self.add_epsilon(left.end, right.start);
                Fragment {
                    start: left.start,
                    end: right.end,
                }
            }
            Regex::Union(l, r) => {
                let left = self.build(l, alphabet, next_position)?;
                let right = self.build(r, alphabet, next_position)?;
                let s = self.add_state();
                self.add_epsilon(s, left.start);
                self.add_epsilon(s, right.start);
                self.add_epsilon(left.end, right.end);
                Fragment {
                    start: s,
                    end: right.end,
                }
            }
            Regex::Star(inner) => {
                let body = self.build(inner, alphabet, next_position)?;
                let s = self.add_state();
                let e = self.add_state();
                self.add_epsilon(s, body.start);
                self.add_epsilon(s, e);
                self.add_epsilon(body.end, body.start);
                self.add_epsilon(body.end, e);
                Fragment { start: s, end: e }
            }
        })
    }

    pub fn state_count(&self) -> usize {
        self.accepting.len()
    }

    pub fn start(&self) -> StateId {
        self.start
    }

    pub fn alphabet_len(&self) -> usize {
        self.alphabet_len
    }

    pub fn is_accepting(&self, state: StateId) -> bool {
        self.accepting[state as usize]
    }

    pub fn epsilon_edges(&self, state: StateId) -> &[StateId] {
        &self.epsilon[state as usize]
    }

    pub fn transitions(&self, state: StateId) -> &[Transition] {
        &self.moves[state as usize]
    }

    fn words(&self) -> usize {
        self.state_count().div_ceil(64).max(1)
    }

    fn close(&self, set: &mut [u64]) {
        let mut stack: Vec<StateId> = iter_bits(set).collect();
        while let Some(q) = stack.pop() {
            for &t in &self.epsilon[q as usize] {
                if !test_bit(set, t) {
                    set_bit(set, t);
                    stack.push(t);
                }
            }
        }
    }

    fn start_set(&self) -> Vec<u64> {
        let mut set = vec![0u64; self.words()];
        set_bit(&mut set, self.start);
        self.close(&mut set);
        set
    }

    /// Follows `symbol` from every state in `set` (no closure applied).
    /// Returns the raw target set and the letter positions that fired.
    fn step_raw(&self, set: &[u64], symbol: u8) -> (Vec<u64>, Vec<u32>) {
        let mut next = vec![0u64; self.words()];
        let mut fired = Vec::new();
        for q in iter_bits(set) {
            for t in &self.moves[q as usize] {
                if t.symbol == symbol {
                    set_bit(&mut next, t.target);
                    if let Some(p) = t.position {
                        fired.push(p);
                    }
                }
            }
        }
        (next, fired)
    }

    fn any_accepting(&self, set: &[u64]) -> bool {
        iter_bits(set).any(|q| self.accepting[q as usize])
    }

    /// Membership by direct set simulation.
    pub fn accepts(&self, word: &[u8]) -> bool {
        let mut current = self.start_set();
        for &symbol in word {
            let (mut next, _) = self.step_raw(&current, symbol);
            self.close(&mut next);
            current = next;
        }
        self.any_accepting(&current)
    }

    /// For each prefix `word[..=i]`, the number of distinct letter positions
    /// whose transition fired on the last letter while simulating.
    pub fn active_positions(&self, word: &[u8]) -> Vec<usize> {
        let mut current = self.start_set();
        let mut out = Vec::with_capacity(word.len());
        for &symbol in word {
            let (mut next, mut fired) = self.step_raw(&current, symbol);
            fired.sort_unstable();
            fired.dedup();
            out.push(fired.len());
            self.close(&mut next);
            current = next;
        }
        out
    }

    /// Subset construction producing a complete DFA (the empty subset becomes
    /// an explicit dead state when reachable).
    pub fn determinize(&self, max_states: usize) -> Result<Dfa, AutomataError> {
        let k = self.alphabet_len;
        let mut index: HashMap<Vec<u64>, StateId> = HashMap::new();
        let mut subsets: Vec<Vec<u64>> = Vec::new();
        let mut delta: Vec<StateId> = Vec::new();
        let mut accepting: Vec<bool> = Vec::new();

        let start = self.start_set();
        index.insert(start.clone(), 0);
        subsets.push(start);
        let mut cursor = 0;
        while cursor < subsets.len() {
            let current = subsets[cursor].clone();
            accepting.push(self.any_accepting(&current));
            for symbol in 0..k as u8 {
                let (mut next, _) = self.step_raw(&current, symbol);
                self.close(&mut next);
                let id = match index.get(&next) {
                    Some(&id) => id,
                    None => {
                        if subsets.len() >= max_states {
                            return Err(AutomataError::StateBudgetExceeded { limit: max_states });
                        }
                        let id = subsets.len() as StateId;
                        index.insert(next.clone(), id);
                        subsets.push(next);
                        id
                    }
                };
                delta.push(id);
            }
            cursor += 1;
        }
        Ok(Dfa::from_parts(k, 0, accepting, delta, false))
    }
}

fn test_bit(set: &[u64], i: StateId) -> bool {
    set[(i / 64) as usize] >> (i % 64) & 1 == 1
}

fn set_bit(set: &mut [u64], i: StateId) {
    set[(i / 64) as usize] |= 1 << (i % 64);
}

fn iter_bits(set: &[u64]) -> impl Iterator<Item = StateId> + '_ {
    set.iter().enumerate().flat_map(|(w, &bits)| {
        let mut rest = bits;
        std::iter::from_fn(move || {
            if rest == 0 {
                return None;
            }
            let tz = rest.trailing_zeros();
            rest &= rest - 1;
            Some(w as StateId * 64 + tz)
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::regex::parse;

    fn nfa(r: &str) -> Nfa {
        Nfa::thompson(&parse(r).unwrap(), &Alphabet::binary()).unwrap()
    }

    fn w(s: &str) -> Vec<u8> {
        Alphabet::binary().encode(s).unwrap()
    }

    #[test]
    fn epsilon_is_a_single_accepting_start() {
        let n = nfa("~");
        assert_eq!(n.state_count(), 1);
        assert!(n.is_accepting(n.start()));
        assert!(n.accepts(&[]));
        assert!(!n.accepts(&w("a")));
    }

    #[test]
    fn small_examples() {
        assert!(nfa("a*b").accepts(&w("aab")));
        assert!(!nfa("a*b").accepts(&w("aaa")));
        assert!(nfa("(b|a)*").accepts(&w("abbaba")));
        // union whose right branch is a star must not leak into the loop
        assert!(!nfa("a|b*").accepts(&w("ab")));
        assert!(nfa("a|~").accepts(&[]));
        assert!(!nfa("(a|~)b").accepts(&w("ab").repeat(2)));
    }

    #[test]
    fn size_bound_holds() {
        for r in ["~", "~|~|~|~", "a", "(a|bba)*", "b|(a|(a|b)b)*", "~*~*", "((~|~)*)*"] {
            let ast = parse(r).unwrap();
            let n = Nfa::thompson(&ast, &Alphabet::binary()).unwrap();
            let bound = 2 + 2 * ast.operator_count() + 2 * ast.literal_count();
            assert!(n.state_count() <= bound, "{r}: {} > {bound}", n.state_count());
        }
    }

    #[test]
    fn positions_follow_preorder() {
        let n = nfa("a|ab|abb");
        assert_eq!(n.active_positions(&w("abb")), vec![3, 2, 1]);
        let rev = nfa("a|ba|b(ba)");
        assert_eq!(rev.active_positions(&w("bba")), vec![2, 1, 1]);
        assert_eq!(nfa("a").active_positions(&w("b")), vec![0]);
    }

    #[test]
    fn determinize_respects_budget() {
        let err = nfa("(a|b)*a(a|b)(a|b)(a|b)").determinize(4).unwrap_err();
        assert_eq!(err, AutomataError::StateBudgetExceeded { limit: 4 });
    }
}
