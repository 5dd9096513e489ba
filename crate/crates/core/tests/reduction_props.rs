use sofic_dyck::fixtures::{self, RandomSpec};
use sofic_dyck::paths::{self, label_difference};
use sofic_dyck::reduction::{
    check_class_determinism, check_weak_determinism, dyck_determinism_violation, left_reduce, reverse,
    right_reduce, DeterminismClass,
};
use sofic_dyck::words::is_matched_call;
use sofic_dyck::{DyckAutomaton, Letter};

const FIXTURE_LEN: usize = 8;
const RANDOM_LEN: usize = 8;

fn cases() -> Vec<(String, DyckAutomaton, usize)> {
    let mut v: Vec<_> = fixtures::all().into_iter().map(|(n, a)| (n.to_string(), a, FIXTURE_LEN)).collect();
    let spec = RandomSpec { max_states: 3, ..RandomSpec::default() };
    v.extend((0..20).map(|s| (format!("random-{s}"), fixtures::random_automaton(s, &spec), RANDOM_LEN)));
    v
}

#[test]
fn left_reduction_preserves_labels() {
    for (name, a, len) in cases() {
        let r = left_reduce(&a);
        let diff = label_difference(&a, &r.automaton, len);
        assert!(diff.is_none(), "{name}: {diff:?}");
    }
}

/// Label sets are factor closed, so comparing on every admissible word of
/// `a` and each of its one-letter extensions decides equality up to `len`.
fn same_labels_by_rel(a: &DyckAutomaton, b: &DyckAutomaton, len: usize) -> Option<Vec<Letter>> {
    let mut bad = None;
    paths::for_each_label(a, paths::start_at(0..a.num_states()), len, &mut |w, _| {
        if !b.is_admissible_label(w) && !w.is_empty() {
            bad = Some(w.to_vec());
            return false;
        }
        if w.len() < len {
            for l in a.alphabet().letters() {
                let mut x = w.to_vec();
                x.push(l);
                if !a.is_admissible_label(&x) && b.is_admissible_label(&x) {
                    bad = Some(x);
                    return false;
                }
            }
        }
        true
    });
    bad
}

#[test]
fn right_reduction_preserves_labels() {
    for (name, a, len) in cases() {
        let ra = reverse(&a);
        let diff = label_difference(&ra, &left_reduce(&ra).automaton, len);
        assert!(diff.is_none(), "{name} reversed: {diff:?}");
        let r = right_reduce(&a);
        // rel on the largest random reductions is too slow in debug builds
        if r.automaton.num_states() <= 20 {
            let diff = same_labels_by_rel(&a, &r.automaton, len);
            assert!(diff.is_none(), "{name}: {diff:?}");
        }
    }
}

#[test]
fn left_reduction_is_deterministic() {
    for (name, a, len) in cases() {
        let r = left_reduce(&a).automaton;
        assert!(check_weak_determinism(&r, 0, len), "{name}");
        assert!(check_class_determinism(&r, DeterminismClass::Call), "{name}");
        assert!(check_class_determinism(&r, DeterminismClass::Internal), "{name}");
        let v = dyck_determinism_violation(&r, len.min(6));
        assert!(v.is_none(), "{name}: {v:?}");
    }
}

#[test]
fn right_reduction_is_co_deterministic() {
    for (name, a, _) in cases() {
        let r = right_reduce(&a).automaton;
        assert!(check_class_determinism(&r, DeterminismClass::ReturnCo), "{name}");
    }
}

#[test]
fn empty_summary_iff_matched_call() {
    for (name, a, len) in cases() {
        let r = left_reduce(&a);
        let al = a.alphabet().clone();
        paths::for_each_label(&r.automaton, paths::start_at([r.distinguished]), len, &mut |w, f| {
            for cfg in f.keys() {
                let empty = r.contents[cfg.state].summary.is_empty();
                assert_eq!(empty, is_matched_call(&al, w), "{name}: {w:?}");
            }
            true
        });
    }
}

#[test]
fn reverse_is_involution() {
    for (name, a, _) in cases() {
        assert_eq!(reverse(&reverse(&a)), a, "{name}");
    }
}
