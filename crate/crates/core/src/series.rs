//! Truncated formal power series in one variable and square matrices of them.

use std::fmt::{self, Debug, Display};
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, Zero};

use crate::error::{Error, Result};

/// Coefficient ring for [`TruncatedSeries`].
///
/// Exact work uses [`BigRational`]; `f64` and `f32` are available for quick
/// numerical experiments.
pub trait Scalar:
    Clone + Debug + Display + PartialEq + Num + Neg<Output = Self> + FromPrimitive + Send + Sync + 'static
{
    /// Text form used in machine-readable output.
    fn render(&self) -> String {
        self.to_string()
    }

    /// Parses the form written by [`render`](Scalar::render).
    fn parse(text: &str) -> Option<Self>;

    fn from_int(n: i64) -> Self {
        Self::from_i64(n).expect("integer conversion")
    }
}

impl Scalar for BigRational {
    fn render(&self) -> String {
        format!("{}/{}", self.numer(), self.denom())
    }

    fn parse(text: &str) -> Option<Self> {
        let text = text.trim();
        match text.split_once('/') {
            Some((p, q)) => {
                let p: BigInt = p.trim().parse().ok()?;
                let q: BigInt = q.trim().parse().ok()?;
                if q.is_zero() {
                    None
                } else {
                    Some(BigRational::new(p, q))
                }
            }
            None => text.parse::<BigInt>().ok().map(BigRational::from_integer),
        }
    }
}

impl Scalar for f64 {
    fn parse(text: &str) -> Option<Self> {
        text.trim().parse().ok()
    }
}

impl Scalar for f32 {
    fn parse(text: &str) -> Option<Self> {
        text.trim().parse().ok()
    }
}

/// A power series `c_0 + c_1 z + … + c_N z^N` computed modulo `z^(N+1)`.
#[derive(Clone, PartialEq)]
pub struct TruncatedSeries<T> {
    coeffs: Vec<T>,
}

impl<T: Scalar> TruncatedSeries<T> {
    pub fn zero(order: usize) -> Self {
        TruncatedSeries { coeffs: vec![T::zero(); order + 1] }
    }

    pub fn one(order: usize) -> Self {
        Self::constant(T::one(), order)
    }

    pub fn constant(c: T, order: usize) -> Self {
        Self::monomial(c, 0, order)
    }

    /// `c z^k`, which is zero when `k > order`.
    pub fn monomial(c: T, k: usize, order: usize) -> Self {
        let mut s = Self::zero(order);
        if k <= order {
            s.coeffs[k] = c;
        }
        s
    }

    /// The series `z`.
    pub fn z(order: usize) -> Self {
        Self::monomial(T::one(), 1, order)
    }

    /// Takes the first `order + 1` coefficients, padding with zeros.
    pub fn from_coeffs(mut coeffs: Vec<T>, order: usize) -> Self {
        coeffs.resize(order + 1, T::zero());
        TruncatedSeries { coeffs }
    }

    pub fn from_ints(coeffs: &[i64], order: usize) -> Self {
        Self::from_coeffs(coeffs.iter().map(|&c| T::from_int(c)).collect(), order)
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, k: usize) -> T {
        self.coeffs.get(k).cloned().unwrap_or_else(T::zero)
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn constant_term(&self) -> &T {
        &self.coeffs[0]
    }

    /// Index of the first nonzero coefficient.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn truncate(&self, order: usize) -> Self {
        Self::from_coeffs(self.coeffs.iter().take(order + 1).cloned().collect(), order)
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.order() == other.order() {
            Ok(())
        } else {
            Err(Error::OrderMismatch { left: self.order(), right: other.order() })
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(self.add_unchecked(other))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(self.sub_unchecked(other))
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(self.mul_unchecked(other))
    }

    fn add_unchecked(&self, other: &Self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.clone() + b.clone())
            .collect();
        TruncatedSeries { coeffs }
    }

    fn sub_unchecked(&self, other: &Self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.clone() - b.clone())
            .collect();
        TruncatedSeries { coeffs }
    }

    fn mul_unchecked(&self, other: &Self) -> Self {
        let n = self.order();
        let mut out = vec![T::zero(); n + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs[..=n - i].iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] = out[i + j].clone() + a.clone() * b.clone();
                }
            }
        }
        TruncatedSeries { coeffs: out }
    }

    pub fn scalar_mul(&self, c: &T) -> Self {
        TruncatedSeries { coeffs: self.coeffs.iter().map(|a| a.clone() * c.clone()).collect() }
    }

    /// Multiplication by `z^k`.
    pub fn shift(&self, k: usize) -> Self {
        let n = self.order();
        let mut coeffs = vec![T::zero(); n + 1];
        for i in 0..=n {
            if i + k <= n {
                coeffs[i + k] = self.coeffs[i].clone();
            }
        }
        TruncatedSeries { coeffs }
    }

    pub fn derivative(&self) -> Self {
        let n = self.order();
        let mut coeffs = vec![T::zero(); n + 1];
        for k in 1..=n {
            coeffs[k - 1] = self.coeffs[k].clone() * T::from_int(k as i64);
        }
        TruncatedSeries { coeffs }
    }

    /// Antiderivative with zero constant term; the top coefficient of `self`
    /// falls off.
    pub fn integral(&self) -> Self {
        let n = self.order();
        let mut coeffs = vec![T::zero(); n + 1];
        for (k, c) in coeffs.iter_mut().enumerate().skip(1) {
            *c = self.coeffs[k - 1].clone() / T::from_int(k as i64);
        }
        TruncatedSeries { coeffs }
    }

    fn domain_error(&self, op: &'static str) -> Error {
        Error::Domain { op, constant: self.coeffs[0].render() }
    }

    /// Multiplicative inverse; needs an invertible constant term.
    pub fn inverse(&self) -> Result<Self> {
        let c0 = &self.coeffs[0];
        if c0.is_zero() {
            return Err(self.domain_error("inverse"));
        }
        let inv0 = T::one() / c0.clone();
        let n = self.order();
        let mut out: Vec<T> = Vec::with_capacity(n + 1);
        out.push(inv0.clone());
        for k in 1..=n {
            let mut acc = T::zero();
            for i in 1..=k {
                if !self.coeffs[i].is_zero() {
                    acc = acc + self.coeffs[i].clone() * out[k - i].clone();
                }
            }
            out.push(-(acc * inv0.clone()));
        }
        Ok(TruncatedSeries { coeffs: out })
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(self.mul_unchecked(&other.inverse()?))
    }

    /// Square root with constant term 1; needs `c_0 = 1`.
    pub fn sqrt(&self) -> Result<Self> {
        if !self.coeffs[0].is_one() {
            return Err(self.domain_error("sqrt"));
        }
        let n = self.order();
        let two = T::from_int(2);
        let mut r: Vec<T> = Vec::with_capacity(n + 1);
        r.push(T::one());
        for k in 1..=n {
            let mut acc = self.coeffs[k].clone();
            for i in 1..k {
                acc = acc - r[i].clone() * r[k - i].clone();
            }
            r.push(acc / two.clone());
        }
        Ok(TruncatedSeries { coeffs: r })
    }

    /// Logarithm; needs `c_0 = 1`.
    pub fn log(&self) -> Result<Self> {
        if !self.coeffs[0].is_one() {
            return Err(self.domain_error("log"));
        }
        let q = self.derivative().mul_unchecked(&self.inverse()?);
        Ok(q.integral())
    }

    /// Exponential; needs `c_0 = 0`.
    pub fn exp(&self) -> Result<Self> {
        if !self.coeffs[0].is_zero() {
            return Err(self.domain_error("exp"));
        }
        let n = self.order();
        let mut e: Vec<T> = Vec::with_capacity(n + 1);
        e.push(T::one());
        for k in 1..=n {
            // k e_k = sum_{i=1..k} i s_i e_{k-i}
            let mut acc = T::zero();
            for i in 1..=k {
                if !self.coeffs[i].is_zero() {
                    acc = acc + self.coeffs[i].clone() * T::from_int(i as i64) * e[k - i].clone();
                }
            }
            e.push(acc / T::from_int(k as i64));
        }
        Ok(TruncatedSeries { coeffs: e })
    }

    /// Integer power (negative exponents via [`inverse`](Self::inverse)).
    pub fn powi(&self, e: i64) -> Result<Self> {
        let base = if e < 0 { self.inverse()? } else { self.clone() };
        let mut acc = Self::one(self.order());
        let mut sq = base;
        let mut k = e.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul_unchecked(&sq);
            }
            k >>= 1;
            if k > 0 {
                sq = sq.mul_unchecked(&sq);
            }
        }
        Ok(acc)
    }

    /// Machine form: one rendered coefficient per degree.
    pub fn to_strings(&self) -> Vec<String> {
        self.coeffs.iter().map(Scalar::render).collect()
    }

    pub fn from_strings<S: AsRef<str>>(items: &[S]) -> Result<Self> {
        if items.is_empty() {
            return Err(Error::Input("a series needs at least one coefficient".into()));
        }
        let coeffs = items
            .iter()
            .map(|s| {
                T::parse(s.as_ref())
                    .ok_or_else(|| Error::Input(format!("bad coefficient `{}`", s.as_ref())))
            })
            .collect::<Result<Vec<_>>>()?;
        let order = coeffs.len() - 1;
        Ok(Self::from_coeffs(coeffs, order))
    }
}

impl TruncatedSeries<BigRational> {
    /// Coefficients as integers, when they all are.
    pub fn integer_coeffs(&self) -> Option<Vec<BigInt>> {
        self.coeffs
            .iter()
            .map(|c| if c.is_integer() { Some(c.to_integer()) } else { None })
            .collect()
    }
}

impl<T: Scalar> Debug for TruncatedSeries<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self} + O(z^{})", self.order() + 1)
    }
}

fn is_negative<T: Scalar>(c: &T) -> bool {
    c.render().starts_with('-')
}

impl<T: Scalar> Display for TruncatedSeries<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let neg = is_negative(c);
            let mag = if neg { -c.clone() } else { c.clone() };
            if first {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            first = false;
            match k {
                0 => write!(f, "{mag}")?,
                _ => {
                    if !mag.is_one() {
                        write!(f, "{mag} ")?;
                    }
                    if k == 1 {
                        f.write_str("z")?;
                    } else {
                        write!(f, "z^{k}")?;
                    }
                }
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

macro_rules! series_binop {
    ($tr:ident, $m:ident, $inner:ident) => {
        impl<T: Scalar> $tr<&TruncatedSeries<T>> for &TruncatedSeries<T> {
            type Output = TruncatedSeries<T>;
            /// Panics when the truncation orders differ; use the
            /// `checked_*` methods for fallible arithmetic.
            fn $m(self, rhs: &TruncatedSeries<T>) -> TruncatedSeries<T> {
                assert_eq!(self.order(), rhs.order(), "series order mismatch");
                self.$inner(rhs)
            }
        }
        impl<T: Scalar> $tr for TruncatedSeries<T> {
            type Output = TruncatedSeries<T>;
            fn $m(self, rhs: TruncatedSeries<T>) -> TruncatedSeries<T> {
                (&self).$m(&rhs)
            }
        }
    };
}

series_binop!(Add, add, add_unchecked);
series_binop!(Sub, sub, sub_unchecked);
series_binop!(Mul, mul, mul_unchecked);

impl<T: Scalar> Neg for &TruncatedSeries<T> {
    type Output = TruncatedSeries<T>;
    fn neg(self) -> TruncatedSeries<T> {
        TruncatedSeries { coeffs: self.coeffs.iter().map(|c| -c.clone()).collect() }
    }
}

impl<T: Scalar> Neg for TruncatedSeries<T> {
    type Output = TruncatedSeries<T>;
    fn neg(self) -> TruncatedSeries<T> {
        -&self
    }
}

/// Square matrix of series sharing one truncation order.
#[derive(Clone, PartialEq)]
pub struct SeriesMatrix<T> {
    dim: usize,
    order: usize,
    entries: Vec<TruncatedSeries<T>>,
}

impl<T: Scalar> SeriesMatrix<T> {
    pub fn zeros(dim: usize, order: usize) -> Self {
        SeriesMatrix { dim, order, entries: vec![TruncatedSeries::zero(order); dim * dim] }
    }

    pub fn identity(dim: usize, order: usize) -> Self {
        let mut m = Self::zeros(dim, order);
        for i in 0..dim {
            m.entries[i * dim + i] = TruncatedSeries::one(order);
        }
        m
    }

    pub fn from_fn(dim: usize, order: usize, mut f: impl FnMut(usize, usize) -> TruncatedSeries<T>) -> Self {
        let mut entries = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                entries.push(f(i, j).truncate(order));
            }
        }
        SeriesMatrix { dim, order, entries }
    }

    /// Builds from rows; rejects ragged or non-square input and mixed orders.
    pub fn from_rows(rows: Vec<Vec<TruncatedSeries<T>>>) -> Result<Self> {
        let dim = rows.len();
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::NotSquare { rows: dim, cols });
        }
        let order = rows.first().and_then(|r| r.first()).map_or(0, TruncatedSeries::order);
        let mut entries = Vec::with_capacity(dim * dim);
        for row in rows {
            for s in row {
                if s.order() != order {
                    return Err(Error::OrderMismatch { left: order, right: s.order() });
                }
                entries.push(s);
            }
        }
        Ok(SeriesMatrix { dim, order, entries })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn get(&self, i: usize, j: usize) -> &TruncatedSeries<T> {
        &self.entries[i * self.dim + j]
    }

    pub fn set(&mut self, i: usize, j: usize, s: TruncatedSeries<T>) {
        assert_eq!(s.order(), self.order, "series order mismatch");
        self.entries[i * self.dim + j] = s;
    }

    pub fn get_mut(&mut self, i: usize, j: usize) -> &mut TruncatedSeries<T> {
        &mut self.entries[i * self.dim + j]
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.order != other.order {
            return Err(Error::OrderMismatch { left: self.order, right: other.order });
        }
        if self.dim != other.dim {
            return Err(Error::Precondition(format!(
                "matrix dimensions differ: {} vs {}",
                self.dim, other.dim
            )));
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect();
        Ok(SeriesMatrix { dim: self.dim, order: self.order, entries })
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a - b).collect();
        Ok(SeriesMatrix { dim: self.dim, order: self.order, entries })
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let n = self.dim;
        let mut out = Self::zeros(n, self.order);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        let prod = a * b;
                        let e = out.get_mut(i, j);
                        *e = &*e + &prod;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn scalar_mul(&self, s: &TruncatedSeries<T>) -> Self {
        let entries = self.entries.iter().map(|a| a * s).collect();
        SeriesMatrix { dim: self.dim, order: self.order, entries }
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(TruncatedSeries::is_zero)
    }

    /// `I - self`.
    pub fn one_minus(&self) -> Self {
        let mut m = Self::identity(self.dim, self.order);
        for (e, a) in m.entries.iter_mut().zip(&self.entries) {
            *e = &*e - a;
        }
        m
    }

    /// Laplace expansion along the first row. Exponential in the dimension,
    /// so it refuses matrices larger than 8.
    pub fn det_cofactor(&self) -> Result<TruncatedSeries<T>> {
        if self.dim > 8 {
            return Err(Error::TooLarge { what: "cofactor expansion dimension", size: self.dim as u128, cap: 8 });
        }
        let cols: Vec<usize> = (0..self.dim).collect();
        Ok(self.minor_det(0, &cols))
    }

    fn minor_det(&self, row: usize, cols: &[usize]) -> TruncatedSeries<T> {
        if cols.is_empty() {
            return TruncatedSeries::one(self.order);
        }
        let mut acc = TruncatedSeries::zero(self.order);
        for (k, &c) in cols.iter().enumerate() {
            let a = self.get(row, c);
            if a.is_zero() {
                continue;
            }
            let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
            let term = a * &self.minor_det(row + 1, &rest);
            acc = if k % 2 == 0 { &acc + &term } else { &acc - &term };
        }
        acc
    }

    /// Gaussian elimination with series division. Pivots are chosen among
    /// entries with an invertible constant term; if none exists in a column
    /// the constant-term matrix is singular and [`Error::Singular`] is
    /// returned.
    pub fn det_elimination(&self) -> Result<TruncatedSeries<T>> {
        let n = self.dim;
        let mut m = self.entries.clone();
        let mut det = TruncatedSeries::one(self.order);
        for col in 0..n {
            let pivot = (col..n)
                .find(|&r| !m[r * n + col].constant_term().is_zero())
                .ok_or(Error::Singular)?;
            if pivot != col {
                for j in 0..n {
                    m.swap(pivot * n + j, col * n + j);
                }
                det = -det;
            }
            let p = m[col * n + col].clone();
            det = &det * &p;
            let pinv = p.inverse()?;
            for r in col + 1..n {
                if m[r * n + col].is_zero() {
                    continue;
                }
                let factor = &m[r * n + col] * &pinv;
                for j in col..n {
                    let t = &factor * &m[col * n + j];
                    m[r * n + j] = &m[r * n + j] - &t;
                }
            }
        }
        Ok(det)
    }

    /// Cofactor expansion up to dimension 4, elimination above.
    pub fn det(&self) -> Result<TruncatedSeries<T>> {
        if self.dim <= 4 {
            self.det_cofactor()
        } else {
            self.det_elimination()
        }
    }

    /// `self^{-1}` by Gauss-Jordan elimination; needs an invertible
    /// constant-term matrix.
    pub fn inverse(&self) -> Result<Self> {
        let n = self.dim;
        let mut a = self.entries.clone();
        let mut b = Self::identity(n, self.order).entries;
        for col in 0..n {
            let pivot = (col..n)
                .find(|&r| !a[r * n + col].constant_term().is_zero())
                .ok_or(Error::Singular)?;
            if pivot != col {
                for j in 0..n {
                    a.swap(pivot * n + j, col * n + j);
                    b.swap(pivot * n + j, col * n + j);
                }
            }
            let pinv = a[col * n + col].inverse()?;
            for j in 0..n {
                a[col * n + j] = &a[col * n + j] * &pinv;
                b[col * n + j] = &b[col * n + j] * &pinv;
            }
            for r in 0..n {
                if r == col || a[r * n + col].is_zero() {
                    continue;
                }
                let factor = a[r * n + col].clone();
                for j in 0..n {
                    let ta = &factor * &a[col * n + j];
                    a[r * n + j] = &a[r * n + j] - &ta;
                    let tb = &factor * &b[col * n + j];
                    b[r * n + j] = &b[r * n + j] - &tb;
                }
            }
        }
        Ok(SeriesMatrix { dim: n, order: self.order, entries: b })
    }

    /// `(I - self)^{-1}`, the geometric series `I + M + M^2 + …`.
    pub fn star(&self) -> Result<Self> {
        self.one_minus().inverse()
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> SeriesMatrix<U> {
        SeriesMatrix {
            dim: self.dim,
            order: self.order,
            entries: self
                .entries
                .iter()
                .map(|s| TruncatedSeries::from_coeffs(s.coeffs.iter().map(&f).collect(), s.order()))
                .collect(),
        }
    }
}

impl<T: Scalar> Debug for SeriesMatrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[")?;
        for i in 0..self.dim {
            let row: Vec<String> = (0..self.dim).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

/// Exact rational from a pair of machine integers.
pub fn ratio(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}


#[cfg(test)]
mod tests {
    use super::*;

    type S = TruncatedSeries<BigRational>;

    fn ints(c: &[i64], n: usize) -> S {
        S::from_ints(c, n)
    }

    #[test]
    fn ring_examples() {
        let a = ints(&[1, 1], 6) * ints(&[1, -1], 6);
        assert_eq!(a, ints(&[1, 0, -1], 6));
        assert_eq!(S::one(5).shift(2), ints(&[0, 0, 1], 5));
    }

    #[test]
    fn order_mismatch_is_an_error() {
        let e = ints(&[1], 3).checked_add(&ints(&[1], 4)).unwrap_err();
        assert!(matches!(e, Error::OrderMismatch { left: 3, right: 4 }));
    }

    #[test]
    fn geometric_inverse() {
        let s = ints(&[1, -1], 8).inverse().unwrap();
        assert_eq!(s, ints(&[1; 9], 8));
    }

    #[test]
    fn sqrt_example() {
        let s = ints(&[1, 0, -10, 0, 1], 8).sqrt().unwrap();
        assert_eq!(s, ints(&[1, 0, -5, 0, -12, 0, -60, 0, -372], 8));
        assert_eq!(&s * &s, ints(&[1, 0, -10, 0, 1], 8));
    }

    #[test]
    fn exp_log_round_trip() {
        let s = ints(&[1, 1], 10);
        assert_eq!(s.log().unwrap().exp().unwrap(), s);
    }

    #[test]
    fn domain_errors_name_the_constant() {
        let e = ints(&[2, 1], 3).log().unwrap_err();
        assert!(e.to_string().contains("2/1"), "{e}");
        assert!(ints(&[0, 1], 3).inverse().is_err());
        assert!(ints(&[1, 1], 3).exp().is_err());
        assert!(ints(&[4], 3).sqrt().is_err());
    }

    #[test]
    fn display_and_machine_form() {
        let s = ints(&[1, -5, 0, 19], 3);
        assert_eq!(s.to_string(), "1 - 5 z + 19 z^3");
        assert_eq!(s.to_strings(), vec!["1/1", "-5/1", "0/1", "19/1"]);
        assert_eq!(S::from_strings(&s.to_strings()).unwrap(), s);
        assert_eq!(S::zero(2).to_string(), "0");
    }

    #[test]
    fn det_small() {
        let m = SeriesMatrix::from_rows(vec![vec![ints(&[3, 1], 4)]]).unwrap();
        assert_eq!(m.det().unwrap(), ints(&[3, 1], 4));
        assert_eq!(SeriesMatrix::<BigRational>::identity(3, 4).det().unwrap(), S::one(4));
    }

    #[test]
    fn star_of_scalar() {
        let m = SeriesMatrix::from_rows(vec![vec![ints(&[0, 3], 6)]]).unwrap();
        let st = m.star().unwrap();
        assert_eq!(st.get(0, 0), &ints(&[1, 3, 9, 27, 81, 243, 729], 6));
        let z = SeriesMatrix::<BigRational>::zeros(2, 3);
        assert_eq!(z.star().unwrap(), SeriesMatrix::identity(2, 3));
    }

    #[test]
    fn ragged_rows_rejected() {
        let r = SeriesMatrix::from_rows(vec![vec![ints(&[1], 2), ints(&[1], 2)]]);
        assert!(matches!(r, Err(Error::NotSquare { rows: 1, cols: 2 })));
    }

    #[test]
    fn float_scalars_work() {
        let s: TruncatedSeries<f64> = TruncatedSeries::from_ints(&[1, -1], 4);
        let inv = s.inverse().unwrap();
        assert_eq!(inv.coeffs(), &[1.0, 1.0, 1.0, 1.0, 1.0]);
        let t: TruncatedSeries<f32> = TruncatedSeries::from_ints(&[1, 2], 3);
        assert!((t.log().unwrap().coeff(1) - 2.0).abs() < 1e-6);
    }
}
