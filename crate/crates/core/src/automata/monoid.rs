//! Star-freeness through aperiodicity of the transition monoid.
//!
//! A regular language is star-free exactly when the transition monoid of
//! its minimal DFA is aperiodic: every element `t` satisfies
//! `t^m = t^(m+1)` for some `m ≥ 1`. For a single state transformation this
//! holds iff its functional graph has no cycle longer than one (all cycles
//! are fixed points), so each monoid element is checked in linear time.

use std::collections::HashSet;

use super::dfa::Dfa;
use super::AutomataError;

type Transformation = Box<[u16]>;

/// `max_monoid_size` caps the number of distinct transformations explored.
pub fn is_starfree(dfa: &Dfa, max_monoid_size: usize) -> Result<bool, AutomataError> {
    let minimized;
    let dfa = if dfa.is_minimal() {
        dfa
    } else {
        minimized = dfa.minimize();
        &minimized
    };
    let n = dfa.state_count();
    assert!(n <= u16::MAX as usize + 1, "too many states for a monoid scan");
    let generators: Vec<Transformation> = (0..dfa.alphabet_len() as u8)
        .map(|s| dfa.letter_map(s).into_iter().map(|t| t as u16).collect())
        .collect();

    let identity: Transformation = (0..n as u16).collect();
    let mut seen: HashSet<Transformation> = HashSet::new();
    let mut frontier: Vec<Transformation> = vec![identity.clone()];
    seen.insert(identity);
    let mut cycle_scratch = vec![0u32; n];
    let mut epoch = 0u32;

    while let Some(t) = frontier.pop() {
        if !is_aperiodic(&t, &mut cycle_scratch, &mut epoch) {
            return Ok(false);
        }
        for g in &generators {
            // read t, then the letter
            let next: Transformation = t.iter().map(|&q| g[q as usize]).collect();
            if !seen.contains(&next) {
                if seen.len() >= max_monoid_size {
                    return Err(AutomataError::MonoidBudgetExceeded { limit: max_monoid_size });
                }
                seen.insert(next.clone());
                frontier.push(next);
            }
        }
    }
    Ok(true)
}

/// True iff every cycle in the functional graph of `t` is a fixed point.
///
/// `visit` stamps states with `epoch + path-id` so no clearing is needed
/// between calls.
fn is_aperiodic(t: &[u16], visit: &mut [u32], epoch: &mut u32) -> bool {
    let n = t.len();
    if *epoch > u32::MAX - 2 * n as u32 - 2 {
        visit.iter_mut().for_each(|v| *v = 0);
        *epoch = 0;
    }
    let base = *epoch;
    // stamp > base: visited in this call; stamp == base + 1 + start: on the
    // path launched from `start`
    for start in 0..n {
        if visit[start] > base {
            continue;
        }
        let path = base + 1 + start as u32;
        let mut q = start;
        while visit[q] <= base {
            visit[q] = path;
            q = t[q] as usize;
        }
        if visit[q] == path && t[q] as usize != q {
            // closed a new cycle through q that is not a fixed point
            return false;
        }
    }
    *epoch = base + 1 + n as u32;
    true
}
