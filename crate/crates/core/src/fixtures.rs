//! Embedded example automata and a seeded generator of small random ones.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::automaton::{DyckAutomaton, Edge};
use crate::words::{LetterClass, PushdownAlphabet};

pub const EX1_JSON: &str = include_str!("../fixtures/ex1.json");
pub const D2_JSON: &str = include_str!("../fixtures/d2.json");
pub const MOTZKIN_JSON: &str = include_str!("../fixtures/motzkin.json");
pub const ND_JSON: &str = include_str!("../fixtures/nd.json");
pub const LR_JSON: &str = include_str!("../fixtures/lr.json");
pub const SAMPLE_GRAMMAR_JSON: &str = include_str!("../fixtures/sample_grammar.json");

fn load(text: &str) -> DyckAutomaton {
    DyckAutomaton::from_json(text).expect("embedded fixture is valid")
}

/// Two states; call loops `a`, `a'` and return loops `b`, `b'` on state 1,
/// internal `i` between 1 and 2; `(a, b)` and `(a', b')` matched.
pub fn ex1() -> DyckAutomaton {
    load(EX1_JSON)
}

/// One-state Dyck shift of order 2.
pub fn d2() -> DyckAutomaton {
    load(D2_JSON)
}

/// One-state Motzkin shift with brackets `(`, `[` and internal `i`.
pub fn motzkin() -> DyckAutomaton {
    load(MOTZKIN_JSON)
}

/// Three states; the shift it presents has no deterministic presentation.
pub fn nd() -> DyckAutomaton {
    load(ND_JSON)
}

/// Three states with two `b` edges leaving state 1.
pub fn lr() -> DyckAutomaton {
    load(LR_JSON)
}

pub fn all() -> Vec<(&'static str, DyckAutomaton)> {
    vec![("fix-ex1", ex1()), ("fix-d2", d2()), ("fix-motz", motzkin()), ("fix-nd", nd()), ("fix-lr", lr())]
}

/// Looks up `fix-ex1`, `@fix-ex1`, `ex1`, ... case-insensitively.
pub fn by_name(name: &str) -> Option<DyckAutomaton> {
    let key = name.trim_start_matches('@').to_ascii_lowercase();
    let key = key.strip_prefix("fix-").unwrap_or(&key).to_string();
    let key = if key == "motzkin" { "motz".to_string() } else { key };
    all()
        .into_iter()
        .find(|(n, _)| n.strip_prefix("fix-") == Some(key.as_str()))
        .map(|(_, a)| a)
}

/// Parameters of [`random_automaton`].
#[derive(Clone, Debug)]
pub struct RandomSpec {
    pub max_states: usize,
    pub max_letters: usize,
    pub edge_probability: f64,
    pub match_probability: f64,
}

impl Default for RandomSpec {
    fn default() -> Self {
        RandomSpec { max_states: 3, max_letters: 6, edge_probability: 0.3, match_probability: 0.5 }
    }
}

/// A random valid automaton with at least one call and one return letter.
pub fn random_automaton(seed: u64, spec: &RandomSpec) -> DyckAutomaton {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nq = rng.gen_range(1..=spec.max_states.max(1));
    let budget = spec.max_letters.max(2);
    let calls = rng.gen_range(1..=((budget - 1) / 2).clamp(1, 2));
    let rets = rng.gen_range(1..=((budget - calls) / 2).clamp(1, 2));
    let ints = rng.gen_range(0..=(budget - calls - rets).min(2));
    let name = |p: &str, k: usize| format!("{p}{k}");
    let call: Vec<String> = (0..calls).map(|k| name("a", k)).collect();
    let ret: Vec<String> = (0..rets).map(|k| name("b", k)).collect();
    let int: Vec<String> = (0..ints).map(|k| name("i", k)).collect();
    let alphabet = PushdownAlphabet::new(&call, &ret, &int).expect("generated alphabet is valid");
    let mut edges = Vec::new();
    for p in 0..nq {
        for l in alphabet.letters() {
            for q in 0..nq {
                if rng.gen_bool(spec.edge_probability) {
                    edges.push(Edge { from: p, letter: l, to: q });
                }
            }
        }
    }
    let mut matched = BTreeSet::new();
    for (i, e) in edges.iter().enumerate() {
        if alphabet.class(e.letter) != LetterClass::Call {
            continue;
        }
        for (j, f) in edges.iter().enumerate() {
            if alphabet.class(f.letter) == LetterClass::Return && rng.gen_bool(spec.match_probability) {
                matched.insert((i, j));
            }
        }
    }
    let states = (1..=nq).map(|k| k.to_string()).collect();
    DyckAutomaton::new(alphabet, states, edges, matched).expect("generated automaton is valid")
}

/// The `count` automata used by the differential suites, seeds `0..count`.
pub fn random_suite(count: u64) -> Vec<DyckAutomaton> {
    (0..count).map(|s| random_automaton(s, &RandomSpec::default())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_load() {
        for (name, a) in all() {
            assert!(a.validate().is_empty(), "{name}");
        }
        assert_eq!(by_name("@FIX-EX1"), Some(ex1()));
        assert_eq!(by_name("motzkin"), Some(motzkin()));
        assert!(by_name("@nope").is_none());
    }

    #[test]
    fn random_automata_respect_bounds() {
        for a in random_suite(50) {
            assert!(a.num_states() <= 3);
            assert!(a.alphabet().len() <= 6);
            assert!(a.validate().is_empty());
        }
        assert_eq!(random_automaton(7, &RandomSpec::default()), random_automaton(7, &RandomSpec::default()));
    }
}
