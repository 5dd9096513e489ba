//! Explicit admissible-path unfolding: a run is a current state plus the
//! stack of call edges still waiting for their return.
//!
//! This is deliberately independent of [`DyckAutomaton::rel`]; the two are
//! compared in tests.

use std::collections::BTreeMap;

use crate::automaton::{DyckAutomaton, StateId};
use crate::words::{Letter, LetterClass};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Config {
    pub state: StateId,
    pub stack: Vec<usize>,
}

/// Configurations with the number of distinct paths reaching each.
pub type Frontier = BTreeMap<Config, u64>;

pub fn start_at(states: impl IntoIterator<Item = StateId>) -> Frontier {
    states.into_iter().map(|s| (Config { state: s, stack: Vec::new() }, 1)).collect()
}

/// Extends every path by one edge labeled `l`.
pub fn step(a: &DyckAutomaton, frontier: &Frontier, l: Letter) -> Frontier {
    let class = a.alphabet().class(l);
    let mut out = Frontier::new();
    for (cfg, &n) in frontier {
        let mut push = |c: Config| *out.entry(c).or_insert(0) += n;
        for &ei in a.out_edges(cfg.state, l) {
            let to = a.edge(ei).to;
            match class {
                LetterClass::Internal => push(Config { state: to, stack: cfg.stack.clone() }),
                LetterClass::Call => {
                    let mut stack = cfg.stack.clone();
                    stack.push(ei);
                    push(Config { state: to, stack });
                }
                LetterClass::Return => match cfg.stack.last() {
                    None => push(Config { state: to, stack: Vec::new() }),
                    Some(&top) => {
                        if a.is_matched(top, ei) {
                            let mut stack = cfg.stack.clone();
                            stack.pop();
                            push(Config { state: to, stack });
                        }
                    }
                },
            }
        }
    }
    out
}

pub fn run(a: &DyckAutomaton, from: Frontier, w: &[Letter]) -> Frontier {
    w.iter().fold(from, |f, &l| step(a, &f, l))
}

pub fn path_count(f: &Frontier) -> u64 {
    f.values().sum()
}

/// Number of admissible paths of each length `0..=max_len` starting in
/// `start`, summed over all labels.
pub fn count_paths(a: &DyckAutomaton, start: StateId, max_len: usize) -> Vec<u64> {
    let mut counts = vec![0; max_len + 1];
    let mut frontier = start_at([start]);
    for slot in counts.iter_mut() {
        *slot = path_count(&frontier);
        let mut next = Frontier::new();
        for l in a.alphabet().letters() {
            for (c, n) in step(a, &frontier, l) {
                *next.entry(c).or_insert(0) += n;
            }
        }
        frontier = next;
    }
    counts
}

/// Calls `visit(word, frontier)` for every word of length `≤ max_len` whose
/// frontier is nonempty, depth first in letter order.
pub fn for_each_label(
    a: &DyckAutomaton,
    start: Frontier,
    max_len: usize,
    visit: &mut dyn FnMut(&[Letter], &Frontier) -> bool,
) {
    fn go(
        a: &DyckAutomaton,
        word: &mut Vec<Letter>,
        f: &Frontier,
        max_len: usize,
        visit: &mut dyn FnMut(&[Letter], &Frontier) -> bool,
    ) -> bool {
        if !visit(word, f) {
            return false;
        }
        if word.len() == max_len {
            return true;
        }
        for l in a.alphabet().letters() {
            let next = step(a, f, l);
            if next.is_empty() {
                continue;
            }
            word.push(l);
            let keep_going = go(a, word, &next, max_len, visit);
            word.pop();
            if !keep_going {
                return false;
            }
        }
        true
    }
    if !start.is_empty() {
        go(a, &mut Vec::new(), &start, max_len, visit);
    }
}

/// All admissible labels of length `≤ max_len` (from any state), sorted.
pub fn admissible_labels(a: &DyckAutomaton, max_len: usize) -> Vec<Vec<Letter>> {
    let mut out = Vec::new();
    for_each_label(a, start_at(0..a.num_states()), max_len, &mut |w, _| {
        out.push(w.to_vec());
        true
    });
    out.sort();
    out
}

/// First word of length `≤ max_len` admissible in exactly one of `a` and
/// `b` (which must share an alphabet), or `None` when the label sets agree.
pub fn label_difference(a: &DyckAutomaton, b: &DyckAutomaton, max_len: usize) -> Option<Vec<Letter>> {
    fn go(
        a: &DyckAutomaton,
        b: &DyckAutomaton,
        word: &mut Vec<Letter>,
        fa: &Frontier,
        fb: &Frontier,
        max_len: usize,
    ) -> Option<Vec<Letter>> {
        if fa.is_empty() != fb.is_empty() {
            return Some(word.clone());
        }
        if fa.is_empty() || word.len() == max_len {
            return None;
        }
        for l in a.alphabet().letters() {
            let na = step(a, fa, l);
            let nb = step(b, fb, l);
            word.push(l);
            let found = go(a, b, word, &na, &nb, max_len);
            word.pop();
            if found.is_some() {
                return found;
            }
        }
        None
    }
    go(
        a,
        b,
        &mut Vec::new(),
        &start_at(0..a.num_states()),
        &start_at(0..b.num_states()),
        max_len,
    )
}
