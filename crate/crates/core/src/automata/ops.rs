//! Language operations on complete DFAs, each returning a minimal DFA.

use super::dfa::{Dfa, StateId};
use super::nfa::Nfa;
use super::AutomataError;

/// Product construction; only reachable pairs are materialised.
pub fn union(left: &Dfa, right: &Dfa) -> Dfa {
    assert_eq!(left.alphabet_len(), right.alphabet_len(), "alphabet mismatch");
    let k = left.alphabet_len();
    let nr = right.state_count();
    let mut id = vec![u32::MAX; left.state_count() * nr];
    let mut pairs: Vec<(StateId, StateId)> = vec![(left.start(), right.start())];
    id[left.start() as usize * nr + right.start() as usize] = 0;
    let mut delta = Vec::new();
    let mut accepting = Vec::new();
    let mut cursor = 0;
    while cursor < pairs.len() {
        let (p, q) = pairs[cursor];
        accepting.push(left.is_accepting(p) || right.is_accepting(q));
        for s in 0..k as u8 {
            let (np, nq) = (left.next(p, s), right.next(q, s));
            let slot = np as usize * nr + nq as usize;
            if id[slot] == u32::MAX {
                id[slot] = pairs.len() as u32;
                pairs.push((np, nq));
            }
            delta.push(id[slot]);
        }
        cursor += 1;
    }
    Dfa::from_parts(k, 0, accepting, delta, false).minimize()
}

/// Copies `dfa` into `nfa` with its states offset; returns the offset.
fn embed(nfa: &mut Nfa, dfa: &Dfa) -> StateId {
    let offset = nfa.state_count() as StateId;
    for _ in 0..dfa.state_count() {
        nfa.add_state();
    }
    for q in 0..dfa.state_count() as StateId {
        for s in 0..dfa.alphabet_len() as u8 {
            nfa.add_move(offset + q, s, offset + dfa.next(q, s), None);
        }
    }
    offset
}

pub fn concat(left: &Dfa, right: &Dfa, max_states: usize) -> Result<Dfa, AutomataError> {
    assert_eq!(left.alphabet_len(), right.alphabet_len(), "alphabet mismatch");
    let mut nfa = Nfa::with_states(left.alphabet_len(), 0, 0);
    let lo = embed(&mut nfa, left);
    let ro = embed(&mut nfa, right);
    nfa.set_start(lo + left.start());
    for q in 0..left.state_count() as StateId {
        if left.is_accepting(q) {
            nfa.add_epsilon(lo + q, ro + right.start());
        }
    }
    for q in 0..right.state_count() as StateId {
        nfa.set_accepting(ro + q, right.is_accepting(q));
    }
    Ok(nfa.determinize(max_states)?.minimize())
}

/// Kleene star through a fresh accepting hub state: hub →ε start, and every
/// accepting state →ε hub.
pub fn star(inner: &Dfa, max_states: usize) -> Result<Dfa, AutomataError> {
    let mut nfa = Nfa::with_states(inner.alphabet_len(), 0, 0);
    let offset = embed(&mut nfa, inner);
    let hub = nfa.add_state();
    nfa.set_start(hub);
    nfa.set_accepting(hub, true);
    nfa.add_epsilon(hub, offset + inner.start());
    for q in 0..inner.state_count() as StateId {
        if inner.is_accepting(q) {
            nfa.add_epsilon(offset + q, hub);
        }
    }
    Ok(nfa.determinize(max_states)?.minimize())
}
