#![allow(dead_code)]

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sofic_dyck::{Matrix, Rational, Series};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn small(rng: &mut ChaCha8Rng) -> Rational {
    Rational::new(BigInt::from(rng.gen_range(-4..=4)), BigInt::from(rng.gen_range(1..=3)))
}

/// A series with small rational coefficients and the given constant term.
pub fn series(rng: &mut ChaCha8Rng, order: usize, c0: Option<Rational>) -> Series {
    let mut coeffs: Vec<Rational> = (0..=order).map(|_| small(rng)).collect();
    if let Some(c) = c0 {
        coeffs[0] = c;
    }
    Series::from_coeffs(coeffs, order)
}

pub fn matrix(rng: &mut ChaCha8Rng, dim: usize, order: usize) -> Matrix {
    Matrix::from_fn(dim, order, |_, _| series(rng, order, None))
}

/// Matrix with zero constant terms, so its star exists.
pub fn nilpotent_matrix(rng: &mut ChaCha8Rng, dim: usize, order: usize) -> Matrix {
    let zero = Rational::from_integer(BigInt::from(0));
    Matrix::from_fn(dim, order, |_, _| series(rng, order, Some(zero.clone())))
}

pub fn one() -> Rational {
    Rational::from_integer(BigInt::from(1))
}

/// Checks every series identity on the input drawn from `seed`; returns the
/// name of the first one that fails.
pub fn series_identities(seed: u64, order: usize, det_order: usize) -> Result<(), String> {
    let mut r = rng(seed);
    let fail = |what: &str| Err(format!("seed {seed}: {what}"));
    let zero = Rational::from_integer(BigInt::from(0));

    let mut c0 = small(&mut r);
    if c0 == zero {
        c0 = one();
    }
    let s = series(&mut r, order, Some(c0));
    let inv = s.inverse().map_err(|e| e.to_string())?;
    if &s * &inv != Series::one(order) {
        return fail("inverse");
    }

    let u = series(&mut r, order, Some(one()));
    let root = u.sqrt().map_err(|e| e.to_string())?;
    if &root * &root != u || *root.constant_term() != one() {
        return fail("sqrt");
    }
    let l = u.log().map_err(|e| e.to_string())?;
    if l.exp().map_err(|e| e.to_string())? != u {
        return fail("exp(log)");
    }
    // differentiation loses the top coefficient
    let rhs = &u.derivative() * &u.inverse().map_err(|e| e.to_string())?;
    if l.derivative().truncate(order - 1) != rhs.truncate(order - 1) {
        return fail("derivative(log)");
    }
    let t = series(&mut r, order, Some(zero.clone()));
    if t.exp().and_then(|e| e.log()).map_err(|e| e.to_string())? != t {
        return fail("log(exp)");
    }

    let a = matrix(&mut r, 3, det_order);
    let b = matrix(&mut r, 3, det_order);
    let ab = a.checked_mul(&b).map_err(|e| e.to_string())?;
    let det = |m: &Matrix| m.det().map_err(|e| e.to_string());
    if det(&ab)? != &det(&a)? * &det(&b)? {
        return fail("det multiplicativity");
    }
    if det(&a)? != a.det_cofactor().map_err(|e| e.to_string())? {
        return fail("det elimination vs cofactor");
    }

    let m = nilpotent_matrix(&mut r, 3, order);
    let st = m.star().map_err(|e| e.to_string())?;
    let id = Matrix::identity(3, order);
    if st.checked_mul(&m.one_minus()).map_err(|e| e.to_string())? != id {
        return fail("star");
    }
    // M* = I + M·M*
    if id.checked_add(&m.checked_mul(&st).map_err(|e| e.to_string())?).map_err(|e| e.to_string())? != st {
        return fail("star fixed point");
    }
    Ok(())
}
