//! Words over prime Dyck words and call letters factor uniquely, also
//! cyclically, which is what lets cycles of block paths be counted by
//! determinants.

use sofic_dyck::fixtures;
use sofic_dyck::paths;
use sofic_dyck::reduction::left_reduce;
use sofic_dyck::words::{is_dyck, prime_factorize};
use sofic_dyck::{Letter, LetterClass, PushdownAlphabet};

fn is_block(al: &PushdownAlphabet, w: &[Letter]) -> bool {
    match w {
        [l] if al.class(*l) == LetterClass::Call => true,
        _ => !w.is_empty() && is_dyck(al, w) && prime_factorize(al, w).map(|f| f.len() == 1).unwrap_or(false),
    }
}

/// Every factorization of `w` into blocks, as cut positions.
fn factorizations(al: &PushdownAlphabet, w: &[Letter]) -> Vec<Vec<usize>> {
    fn go(al: &PushdownAlphabet, w: &[Letter], i: usize, cuts: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i == w.len() {
            out.push(cuts.clone());
            return;
        }
        for j in i + 1..=w.len() {
            if is_block(al, &w[i..j]) {
                cuts.push(j);
                go(al, w, j, cuts, out);
                cuts.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(al, w, 0, &mut vec![0], &mut out);
    out
}

#[test]
fn block_factorizations_are_cyclically_unique() {
    for (name, a) in fixtures::all() {
        let r = left_reduce(&a).automaton;
        let al = r.alphabet().clone();
        let n = r.num_states();
        let mut cycles = 0;
        paths::for_each_label(&r, paths::start_at(0..n), 8, &mut |w, _| {
            if w.is_empty() || !r.rel(w).has_cycle(n) {
                return true;
            }
            let f = factorizations(&al, w);
            if f.is_empty() {
                return true;
            }
            assert_eq!(f.len(), 1, "{name}: {w:?}");
            cycles += 1;
            let cuts = &f[0];
            for k in 1..w.len() {
                let rotated: Vec<Letter> = w[k..].iter().chain(&w[..k]).copied().collect();
                if !factorizations(&al, &rotated).is_empty() {
                    assert!(cuts.contains(&k), "{name}: {w:?} rotated at {k}");
                }
            }
            true
        });
        assert!(cycles > 0, "{name}");
    }
}
