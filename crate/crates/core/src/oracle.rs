//! Brute-force periodic point counting, used as ground truth for the zeta
//! engine.
//!
//! A word `u` is a periodic pattern when `u^∞` belongs to the shift. Some
//! conjugate `w` of such a `u` is Dyck (balance 0), matched-return
//! (balance > 0) or matched-call (balance < 0); powers of `w` then
//! concatenate without matching across copies, so `w^∞` is the label of an
//! admissible bi-infinite path exactly when the relation of `w` has a cycle.

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::automaton::DyckAutomaton;
use crate::error::{Error, Result};
use crate::series::TruncatedSeries;
use crate::words::{balance, conjugates, is_dyck, is_matched_call, is_matched_return, Letter};

pub const DEFAULT_WORD_CAP: u128 = 10_000_000;

/// Which case of the periodic-pattern decomposition a conjugate falls in.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PatternCase {
    Dyck,
    MatchedReturn,
    MatchedCall,
}

/// The case applying to `w`, if any.
pub fn pattern_case(a: &DyckAutomaton, w: &[Letter]) -> Option<PatternCase> {
    let al = a.alphabet();
    let bal = balance(al, w);
    let mr = is_matched_return(al, w);
    let mc = is_matched_call(al, w);
    // the three cases are disjoint
    debug_assert!(bal == 0 || !(mr && mc));
    match bal {
        0 if is_dyck(al, w) => Some(PatternCase::Dyck),
        b if b > 0 && mr => Some(PatternCase::MatchedReturn),
        b if b < 0 && mc => Some(PatternCase::MatchedCall),
        _ => None,
    }
}

pub fn is_periodic_pattern(a: &DyckAutomaton, u: &[Letter]) -> Result<bool> {
    if u.is_empty() {
        return Err(Error::Precondition("periodic patterns are nonempty words".into()));
    }
    let n = a.num_states();
    for w in conjugates(u) {
        if pattern_case(a, &w).is_some() && a.rel(&w).has_cycle(n) {
            return Ok(true);
        }
    }
    Ok(false)
}

fn check_cap(a: &DyckAutomaton, n: usize, cap: u128) -> Result<u128> {
    let k = a.alphabet().len() as u128;
    let size = k.checked_pow(n as u32).unwrap_or(u128::MAX);
    if size > cap {
        return Err(Error::TooLarge { what: "word enumeration", size, cap });
    }
    Ok(size)
}

/// `p_n`: the number of words of length `n` that are periodic patterns.
pub fn periodic_count(a: &DyckAutomaton, n: usize) -> Result<u64> {
    periodic_count_capped(a, n, DEFAULT_WORD_CAP)
}

pub fn periodic_count_capped(a: &DyckAutomaton, n: usize, cap: u128) -> Result<u64> {
    if n == 0 {
        return Err(Error::Precondition("period must be at least 1".into()));
    }
    check_cap(a, n, cap)?;
    let k = a.alphabet().len();
    if k == 0 || a.num_states() == 0 {
        return Ok(0);
    }
    let mut digits = vec![0usize; n];
    let mut count = 0u64;
    loop {
        let w: Vec<Letter> = digits.iter().map(|&d| Letter(d)).collect();
        if is_periodic_pattern(a, &w)? {
            count += 1;
        }
        // odometer
        let mut i = n;
        loop {
            if i == 0 {
                return Ok(count);
            }
            i -= 1;
            digits[i] += 1;
            if digits[i] < k {
                break;
            }
            digits[i] = 0;
        }
    }
}

/// `exp(Σ_{n≤N} p_n z^n / n)`.
pub fn zeta_oracle(a: &DyckAutomaton, order: usize) -> Result<TruncatedSeries<BigRational>> {
    zeta_oracle_capped(a, order, DEFAULT_WORD_CAP)
}

pub fn zeta_oracle_capped(a: &DyckAutomaton, order: usize, cap: u128) -> Result<TruncatedSeries<BigRational>> {
    let mut coeffs = vec![BigRational::from_integer(BigInt::from(0)); order + 1];
    for (n, c) in coeffs.iter_mut().enumerate().skip(1) {
        let p = periodic_count_capped(a, n, cap)?;
        *c = BigRational::new(BigInt::from(p), BigInt::from(n));
    }
    TruncatedSeries::from_coeffs(coeffs, order).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn word(a: &DyckAutomaton, s: &str) -> Vec<Letter> {
        a.parse_word(s).unwrap().0
    }

    #[test]
    fn pattern_examples() {
        let a = fixtures::ex1();
        assert!(is_periodic_pattern(&a, &word(&a, "i")).unwrap());
        assert!(!is_periodic_pattern(&a, &word(&a, "a i b")).unwrap());
        let d = fixtures::d2();
        assert!(is_periodic_pattern(&d, &word(&d, "b1 b2 b2")).unwrap());
        assert!(is_periodic_pattern(&a, &[]).is_err());
    }

    #[test]
    fn ex1_counts() {
        let a = fixtures::ex1();
        let p: Vec<u64> = (1..=3).map(|n| periodic_count(&a, n).unwrap()).collect();
        assert_eq!(p, vec![5, 13, 53]);
        let z = zeta_oracle(&a, 3).unwrap();
        assert_eq!(z, TruncatedSeries::from_ints(&[1, 5, 19, 71], 3));
    }

    #[test]
    fn d2_counts() {
        let a = fixtures::d2();
        let p: Vec<u64> = (1..=3).map(|n| periodic_count(&a, n).unwrap()).collect();
        assert_eq!(p, vec![4, 12, 40]);
    }

    #[test]
    fn resource_guard() {
        let a = fixtures::ex1();
        let e = periodic_count_capped(&a, 4, 100).unwrap_err();
        assert!(matches!(e, Error::TooLarge { size: 625, cap: 100, .. }));
    }
}
