//! One PASS/FAIL line per acceptance criterion.
//!
//! Runs without the test harness so the report is always printed.

mod common;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use sofic_dyck::constructions::{edge_ftd, grammar_generate, grammar_to_automaton, to_vpa, vpa_run, GrammarFile};
use sofic_dyck::fixtures::{self, RandomSpec};
use sofic_dyck::oracle::{periodic_count, zeta_oracle};
use sofic_dyck::paths::{self, label_difference};
use sofic_dyck::reduction::{
    check_class_determinism, check_weak_determinism, dyck_determinism_violation, left_reduce, DeterminismClass,
};
use sofic_dyck::zeta::{exterior_matrix, path_count_series, zeta, BaseMatrix};
use sofic_dyck::{DyckAutomaton, Error, Letter, Rational, Series, ZetaOptions};

/// Criteria that cannot pass as stated; each still prints its FAIL line.
/// 4: the expected 7 states for FIX-LR leave out `(∅, {2,3})`, which the
/// left reduction reaches from the initial state by the unmatched return
/// `b`.
const KNOWN_FAILURES: &[usize] = &[4];

type Outcome = Result<String, String>;
type Criterion = (usize, fn() -> Outcome, Duration);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn ints(c: &[i64], order: usize) -> Series {
    Series::from_ints(c, order)
}

fn err(e: Error) -> String {
    e.to_string()
}

/// `C11 = (1 − z² − √(1 − 10z² + z⁴)) / 2` and the displayed closed form.
fn closed_form(order: usize) -> Result<Series, Error> {
    let half = Rational::new(BigInt::from(1), BigInt::from(2));
    let root = ints(&[1, 0, -10, 0, 1], order).sqrt()?;
    let c11 = (&ints(&[1, 0, -1], order) - &root).scalar_mul(&half);
    let num = &ints(&[1, 1], order) * &(&ints(&[1, 0, -1], order) - &c11);
    let den = &ints(&[1, -2, -1], order) - &c11;
    num.checked_div(&(&den * &den))
}

fn criterion_1() -> Outcome {
    let z = zeta(&fixtures::ex1(), 12, &ZetaOptions::default()).map_err(err)?;
    let expected = closed_form(12).map_err(err)?;
    ensure(z.zeta == expected, || format!("got {}, expected {}", z.zeta, expected))?;
    Ok(format!("ζ = {}", z.zeta))
}

fn exact_match(a: &DyckAutomaton, order: usize) -> Result<(), String> {
    let z = zeta(a, order, &ZetaOptions::default()).map_err(err)?;
    let o = zeta_oracle(a, order).map_err(err)?;
    ensure(z.zeta == o, || format!("formula {} vs oracle {}", z.zeta, o))?;
    for n in 1..=order {
        let p = Rational::from_integer(BigInt::from(periodic_count(a, n).map_err(err)?));
        ensure(z.periodic[n - 1] == p, || format!("p_{n}: {} vs {p}", z.periodic[n - 1]))?;
    }
    Ok(())
}

fn criterion_2() -> Outcome {
    for (name, a) in fixtures::all() {
        exact_match(&a, 5).map_err(|e| format!("{name}: {e}"))?;
    }
    let mut checked = 0;
    let mut refused = Vec::new();
    let mut seed = 0;
    while checked < 20 {
        let a = fixtures::random_automaton(seed, &RandomSpec::default());
        let z = zeta(&a, 5, &ZetaOptions::default());
        match z {
            Err(Error::TooLarge { .. }) => refused.push(seed),
            Err(e) => return Err(format!("seed {seed}: {e}")),
            Ok(_) => {
                exact_match(&a, 5).map_err(|e| format!("seed {seed}: {e}"))?;
                checked += 1;
            }
        }
        seed += 1;
    }
    Ok(format!("5 fixtures and {checked} random automata agree for n ≤ 5; over the state cap: seeds {refused:?}"))
}

fn criterion_3() -> Outcome {
    let ex1 = fixtures::ex1();
    let d2 = fixtures::d2();
    let p = |a: &DyckAutomaton| -> Result<Vec<u64>, String> {
        (1..=3).map(|n| periodic_count(a, n).map_err(err)).collect()
    };
    ensure(p(&ex1)? == [5, 13, 53], || format!("FIX-EX1 p = {:?}", p(&ex1)))?;
    ensure(p(&d2)? == [4, 12, 40], || format!("FIX-D2 p = {:?}", p(&d2)))?;
    let z = zeta(&ex1, 3, &ZetaOptions::default()).map_err(err)?;
    ensure(z.zeta == ints(&[1, 5, 19, 71], 3), || format!("FIX-EX1 ζ = {}", z.zeta))?;
    let q = |k: i64| Rational::from_integer(BigInt::from(k));
    ensure(z.periodic == [q(5), q(13), q(53)], || "FIX-EX1 formula p".into())?;
    let zd = zeta(&d2, 3, &ZetaOptions::default()).map_err(err)?;
    ensure(zd.periodic == [q(4), q(12), q(40)], || "FIX-D2 formula p".into())?;
    let c2 = exterior_matrix(&ex1, BaseMatrix::C, 2, 8).map_err(err)?;
    ensure(c2.dim() == 1 && c2.entry(0, 0) == ints(&[0, -1], 8), || "C⊗2 on FIX-EX1 is not −z".into())?;
    Ok("p and ζ pinned values hold, C⊗2 = −z".into())
}

fn criterion_4() -> Outcome {
    for (name, a) in fixtures::all() {
        let r = left_reduce(&a);
        let d = &r.automaton;
        ensure(check_weak_determinism(d, r.distinguished, 8), || format!("{name}: not weak-deterministic"))?;
        ensure(check_class_determinism(d, DeterminismClass::Call), || format!("{name}: call"))?;
        ensure(check_class_determinism(d, DeterminismClass::Internal), || format!("{name}: internal"))?;
        if let Some((s, w)) = dyck_determinism_violation(d, 8) {
            return Err(format!("{name}: two paths from {} labeled {}", d.states()[s], d.alphabet().render(&w)));
        }
        if let Some(w) = label_difference(&a, d, 8) {
            return Err(format!("{name}: labels differ on {}", a.alphabet().render(&w)));
        }
    }
    let lr = fixtures::lr();
    let r = left_reduce(&lr);
    let count = r.automaton.num_states();
    let listing: Vec<String> = r
        .sidecar(&lr)
        .iter()
        .map(|e| {
            let s: Vec<String> = e.summary.iter().map(|[p, q]| format!("({p},{q})")).collect();
            format!("{};{}", if s.is_empty() { "∅".into() } else { s.join("") }, e.subset.concat())
        })
        .collect();
    ensure(count == 7, || format!("left_reduce(FIX-LR) has {count} states, expected 7: {}", listing.join(" ")))?;
    Ok("determinism and label preservation hold, FIX-LR reduces to 7 states".into())
}

fn criterion_5() -> Outcome {
    let n = 60;
    let r = left_reduce(&fixtures::motzkin());
    let s = path_count_series(&r.automaton, r.distinguished, n).map_err(err)?;
    let small = paths::count_paths(&r.automaton, r.distinguished, 10);
    for (k, &c) in small.iter().enumerate() {
        let from_series = s.coeff(k);
        ensure(from_series == Rational::from_integer(BigInt::from(c)), || {
            format!("length {k}: series {from_series} vs explicit {c}")
        })?;
    }
    let count = s.coeff(n).to_integer();
    let digits = count.to_string();
    // ln of a big integer through its leading digits
    let lead: f64 = digits[..digits.len().min(15)].parse().unwrap();
    let ln = lead.ln() + (digits.len() - digits.len().min(15)) as f64 * std::f64::consts::LN_10;
    let rate = ln / n as f64;
    let gap = (rate - 4f64.ln()).abs();
    ensure(gap <= 0.10, || format!("(1/n) ln count = {rate:.4}, off by {gap:.4}"))?;
    Ok(format!("count_60 = {count}, (1/n) ln count = {rate:.4}, |· − ln 4| = {gap:.4}"))
}

fn vpa_agrees(a: &DyckAutomaton, len: usize) -> Result<(), Vec<Letter>> {
    let v = to_vpa(a);
    let mut stack = vec![Vec::new()];
    while let Some(w) = stack.pop() {
        let admissible = !a.rel(&w).is_empty();
        if admissible != vpa_run(&v, &w) {
            return Err(w);
        }
        if admissible && w.len() < len {
            stack.extend(a.alphabet().letters().map(|l| {
                let mut x = w.clone();
                x.push(l);
                x
            }));
        }
    }
    Ok(())
}

fn criterion_6() -> Outcome {
    for (name, a) in fixtures::all() {
        vpa_agrees(&a, 8).map_err(|w| format!("{name}: VPA disagrees on {}", a.alphabet().render(&w)))?;
        let image = edge_ftd(&a).and_then(|e| e.image(&a)).map_err(err)?;
        for n in 1..=4 {
            let (x, y) = (periodic_count(&image, n).map_err(err)?, periodic_count(&a, n).map_err(err)?);
            ensure(x == y, || format!("{name}: edge shift image p_{n} = {x}, source {y}"))?;
        }
    }
    let g = GrammarFile::from_json(fixtures::SAMPLE_GRAMMAR_JSON).and_then(|f| f.grammar()).map_err(err)?;
    let a = grammar_to_automaton(&g).map_err(err)?;
    let generated = grammar_generate(&g, 6);
    let labels: BTreeSet<Vec<Letter>> = paths::admissible_labels(&a, 6).into_iter().collect();
    ensure(labels == generated, || "grammar automaton labels differ from generated words".into())?;
    Ok(format!("VPA ≤ 8, edge shift p_n ≤ 4, grammar ≤ 6 ({} words)", generated.len()))
}

fn criterion_7() -> Outcome {
    for seed in 0..100 {
        common::series_identities(seed, 10, 10)?;
    }
    Ok("100 seeded inputs, order 10".into())
}

fn criterion_8() -> Outcome {
    let a = fixtures::ex1();
    let reduced = zeta(&a, 12, &ZetaOptions::default()).map_err(err)?;
    let direct = zeta(&a, 12, &ZetaOptions { reduce: false, ..ZetaOptions::default() }).map_err(err)?;
    ensure(reduced.zeta == direct.zeta, || format!("{} vs {}", reduced.zeta, direct.zeta))?;
    Ok("agree to order 12".into())
}

fn main() {
    let criteria: [Criterion; 8] = [
        (1, criterion_1, Duration::from_secs(5)),
        (2, criterion_2, Duration::from_secs(120)),
        (3, criterion_3, Duration::from_secs(60)),
        (4, criterion_4, Duration::from_secs(60)),
        (5, criterion_5, Duration::from_secs(5)),
        (6, criterion_6, Duration::from_secs(120)),
        (7, criterion_7, Duration::from_secs(120)),
        (8, criterion_8, Duration::from_secs(60)),
    ];
    let mut failed = Vec::new();
    for (n, run, budget) in criteria {
        let start = Instant::now();
        let outcome = run();
        let took = start.elapsed();
        let slow = if took > budget { format!(" (over the {budget:?} budget)") } else { String::new() };
        match outcome {
            Ok(detail) => println!("criterion {n}: PASS [{took:.2?}{slow}] {detail}"),
            Err(detail) => {
                println!("criterion {n}: FAIL [{took:.2?}{slow}] {detail}");
                failed.push(n);
            }
        }
    }
    if failed != KNOWN_FAILURES {
        eprintln!("unexpected acceptance outcome: failing {failed:?}, known {KNOWN_FAILURES:?}");
        std::process::exit(1);
    }
}
