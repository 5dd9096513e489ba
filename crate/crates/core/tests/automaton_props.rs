//! Admissible-path semantics against exhaustive path enumeration.

use std::collections::BTreeSet;

use proptest::prelude::*;
use sofic_dyck::fixtures::{self, RandomSpec};
use sofic_dyck::reduction::reverse;
use sofic_dyck::words::classify;
use sofic_dyck::{DyckAutomaton, Letter, StateRelation};

/// Every edge sequence labeled `w`, kept when each matched pair of
/// positions runs through a matched pair of edges.
fn brute_rel(a: &DyckAutomaton, w: &[Letter]) -> StateRelation {
    let pairs = classify(a.alphabet(), w).matched_pairs;
    let mut out = BTreeSet::new();
    let mut seqs: Vec<Vec<usize>> = vec![vec![]];
    for (pos, &l) in w.iter().enumerate() {
        let mut next = Vec::new();
        for s in &seqs {
            for (i, e) in a.edges().iter().enumerate() {
                if e.letter == l && (pos == 0 || a.edge(s[pos - 1]).to == e.from) {
                    let mut s2 = s.clone();
                    s2.push(i);
                    next.push(s2);
                }
            }
        }
        seqs = next;
    }
    for s in seqs {
        if pairs.iter().all(|&(i, j)| a.is_matched(s[i], s[j])) {
            if w.is_empty() {
                continue;
            }
            out.insert((a.edge(s[0]).from, a.edge(*s.last().unwrap()).to));
        }
    }
    if w.is_empty() {
        return StateRelation::identity(a.num_states());
    }
    StateRelation::from_pairs(out)
}

fn automata() -> Vec<DyckAutomaton> {
    let mut v: Vec<DyckAutomaton> = fixtures::all().into_iter().map(|(_, a)| a).collect();
    v.extend((0..20).map(|s| fixtures::random_automaton(s, &RandomSpec::default())));
    v
}

fn case() -> impl Strategy<Value = (usize, Vec<usize>)> {
    (0usize..25, prop::collection::vec(0usize..64, 0..9))
}

fn word_for(a: &DyckAutomaton, raw: &[usize]) -> Vec<Letter> {
    raw.iter().map(|&x| Letter(x % a.alphabet().len())).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn rel_matches_enumeration((k, raw) in case()) {
        let a = &automata()[k];
        let w = word_for(a, &raw);
        prop_assert_eq!(a.rel(&w), brute_rel(a, &w));
    }

    #[test]
    fn rel_composes_at_clean_splits((k, raw) in case(), cut in 0usize..9) {
        let a = &automata()[k];
        let w = word_for(a, &raw);
        let cut = cut.min(w.len());
        let crosses = classify(a.alphabet(), &w).matched_pairs.iter().any(|&(i, j)| i < cut && cut <= j);
        prop_assume!(!crosses);
        prop_assert_eq!(a.rel(&w), a.rel(&w[..cut]).compose(&a.rel(&w[cut..])));
    }

    #[test]
    fn factors_of_admissible_are_admissible((k, raw) in case(), i in 0usize..9, j in 0usize..9) {
        let a = &automata()[k];
        let w = word_for(a, &raw);
        prop_assume!(!a.rel(&w).is_empty());
        let (i, j) = (i.min(w.len()), j.min(w.len()));
        let (i, j) = (i.min(j), i.max(j));
        prop_assert!(!a.rel(&w[i..j]).is_empty());
    }

    #[test]
    fn reversal_transposes((k, raw) in case()) {
        let a = &automata()[k];
        let w = word_for(a, &raw);
        let r = reverse(a);
        let rw: Vec<Letter> = w.iter().rev().copied().collect();
        prop_assert_eq!(r.rel(&rw), a.rel(&w).transpose());
    }
}

#[test]
fn json_round_trip() {
    for a in automata() {
        let back = DyckAutomaton::from_json(&a.to_json()).unwrap();
        assert_eq!(back, a);
    }
}
