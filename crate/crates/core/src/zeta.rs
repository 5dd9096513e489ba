//! Zeta functions of sofic-Dyck shifts.
//!
//! The zeta function is assembled from five factors, each a product over
//! `ℓ` of determinants `det(I - H_{⊗ℓ})^{(-1)^ℓ}` where `H` ranges over the
//! prime Dyck matrix `C`, the call and return letter matrices `Mc`, `Mr`,
//! and the products `C Mc*`, `Mr* C`:
//!
//! `ζ = ζ_{CMc*} · ζ_{Mr*C} · ζ_{Mc} · ζ_{Mr} / ζ_C`.
//!
//! Exterior powers are computed thread-wise: an entry of `C_{⊗ℓ}` is the
//! signed number of `ℓ`-tuples of admissible base paths sharing one prime
//! Dyck label, the sign being that of the permutation sorting the targets.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::rc::Rc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::automaton::{strongly_connected_components, DyckAutomaton, StateId};
use crate::error::{Error, Result};
use crate::reduction::{left_reduce, right_reduce};
use crate::series::{SeriesMatrix, TruncatedSeries};
use crate::words::LetterClass;

type Series = TruncatedSeries<BigRational>;
type Matrix = SeriesMatrix<BigRational>;

pub const DEFAULT_STATE_CAP: usize = 16;

fn q(n: i128) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn big(n: u128) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// The matrices whose exterior powers enter the product formula.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Factor {
    C,
    CMcStar,
    Mc,
    MrStarC,
    Mr,
}

impl Factor {
    pub const ALL: [Factor; 5] = [Factor::C, Factor::CMcStar, Factor::Mc, Factor::MrStarC, Factor::Mr];

    pub fn name(self) -> &'static str {
        match self {
            Factor::C => "C",
            Factor::CMcStar => "CMc*",
            Factor::Mc => "Mc",
            Factor::MrStarC => "Mr*C",
            Factor::Mr => "Mr",
        }
    }
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Base matrices with an exterior power.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BaseMatrix {
    C,
    Mc,
    Mr,
}

/// How matched pairs of the exterior automaton are formed.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExteriorRule {
    /// Each coordinate keeps its identity through a Dyck segment
    /// (signed counting of path tuples sharing a label).
    #[default]
    ThreadWise,
    /// The i-th call edge (by sorted source) is matched with the i-th
    /// return edge (by sorted source), states of the exterior automaton
    /// being sorted tuples of distinct states throughout.
    IndexAligned,
}

#[derive(Clone, Debug)]
pub struct ZetaOptions {
    pub reduce: bool,
    /// Also compute `ζ_C` on the right reduction and demand equality.
    pub cross_check_c: bool,
    pub rule: ExteriorRule,
    /// Largest number of states (after dropping states on no cycle) the
    /// exterior computation accepts.
    pub state_cap: usize,
}

impl Default for ZetaOptions {
    fn default() -> Self {
        ZetaOptions { reduce: true, cross_check_c: false, rule: ExteriorRule::ThreadWise, state_cap: DEFAULT_STATE_CAP }
    }
}

#[derive(Clone, Debug)]
pub struct ZetaResult {
    pub order: usize,
    pub zeta: Series,
    pub factors: BTreeMap<Factor, Series>,
    /// `p_1 .. p_N`.
    pub periodic: Vec<BigRational>,
    pub left_states: usize,
    pub right_states: usize,
    pub left_core: usize,
    pub right_core: usize,
    /// States (of the cores) carrying the exterior computation.
    pub left_support: SideSupport,
    pub right_support: SideSupport,
    /// True when the determinism hypotheses were asserted by the caller
    /// instead of being established by reduction.
    pub caller_asserted: bool,
}

impl ZetaResult {
    /// `p_n` as integers; `None` if some count is not integral.
    pub fn periodic_integers(&self) -> Option<Vec<BigInt>> {
        self.periodic
            .iter()
            .map(|p| if p.is_integer() { Some(p.to_integer()) } else { None })
            .collect()
    }
}

/// Serializable form of a [`ZetaResult`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZetaReport {
    pub order: usize,
    pub zeta: Vec<String>,
    pub factors: BTreeMap<String, Vec<String>>,
    pub periodic: Vec<String>,
    pub caller_asserted: bool,
}

impl From<&ZetaResult> for ZetaReport {
    fn from(r: &ZetaResult) -> Self {
        ZetaReport {
            order: r.order,
            zeta: r.zeta.to_strings(),
            factors: r.factors.iter().map(|(f, s)| (f.name().to_string(), s.to_strings())).collect(),
            periodic: r.periodic.iter().map(|p| p.to_string()).collect(),
            caller_asserted: r.caller_asserted,
        }
    }
}

/// `C(z)` by the fixed point `C = Σ_internal z 1_pq + Σ_matched z² D_rs`,
/// `D = (I - C)^{-1}`.
pub fn prime_matrix(a: &DyckAutomaton, order: usize) -> Result<Matrix> {
    let n = a.num_states();
    let mut base = Matrix::zeros(n, order);
    for e in a.edges() {
        if a.alphabet().class(e.letter) == LetterClass::Internal {
            let s = base.get(e.from, e.to) + &Series::z(order);
            base.set(e.from, e.to, s);
        }
    }
    let resize = |m: &Matrix, k: usize| Matrix::from_fn(n, k, |i, j| m.get(i, j).clone());
    // a round turns coefficients correct up to z^j into ones correct up to
    // z^(j+2), so the working order grows with the rounds
    let mut c = resize(&base, 1);
    for round in 1.. {
        let k = order.min(2 * round + 1);
        let c_k = resize(&c, k);
        let d = c_k.star()?;
        let z2 = Series::monomial(q(1), 2, k);
        let mut next = resize(&base, k);
        for &(ci, ri) in a.matched() {
            let ce = a.edge(ci);
            let re = a.edge(ri);
            let s = next.get(ce.from, re.to) + &(&z2 * d.get(ce.to, re.from));
            next.set(ce.from, re.to, s);
        }
        let done = k == order && next == c_k;
        c = next;
        if done {
            break;
        }
    }
    Ok(c)
}

/// `(p, q)` entry: number of `class` edges from `p` to `q`, times `z`.
pub fn letter_matrix(a: &DyckAutomaton, class: LetterClass, order: usize) -> Matrix {
    let mut m = Matrix::zeros(a.num_states(), order);
    for e in a.edges() {
        if a.alphabet().class(e.letter) == class {
            let s = m.get(e.from, e.to) + &Series::z(order);
            m.set(e.from, e.to, s);
        }
    }
    m
}

type Tuple = Box<[u32]>;
type TupleMap = HashMap<Tuple, u128>;

fn overflow() -> Error {
    Error::TooLarge { what: "path tuple count", size: u128::MAX, cap: u128::MAX }
}

fn add_into(m: &mut TupleMap, k: Tuple, v: u128) -> Result<()> {
    let e = m.entry(k).or_insert(0);
    *e = e.checked_add(v).ok_or_else(overflow)?;
    Ok(())
}

/// Sign of the permutation sorting `t`, or `None` if `t` has repeats.
fn sort_sign(t: &[u32]) -> Option<(Tuple, i128)> {
    let mut v = t.to_vec();
    let mut sign = 1;
    // insertion sort counting transpositions
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
        if j > 0 && v[j - 1] == v[j] {
            return None;
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some((v.into_boxed_slice(), sign))
}

/// Coupled path counting over ordered tuples of states of one automaton.
///
/// `prime(R, d)[S]` counts `ℓ`-tuples of admissible paths `r_i → s_i`
/// sharing one prime Dyck label of length `d`; `dyck(R, d)` does the same
/// for all Dyck labels.
pub struct Coupled<'a> {
    a: &'a DyckAutomaton,
    // out[letter][state] = [(edge, target)]
    out: Vec<Vec<Vec<(usize, u32)>>>,
    internal: Vec<usize>,
    calls: Vec<usize>,
    returns: Vec<usize>,
    prime_memo: HashMap<(Tuple, usize), Rc<TupleMap>>,
    dyck_memo: HashMap<(Tuple, usize), Rc<TupleMap>>,
}

impl<'a> Coupled<'a> {
    pub fn new(a: &'a DyckAutomaton) -> Self {
        let al = a.alphabet();
        let mut out = vec![vec![Vec::new(); a.num_states()]; al.len()];
        for (i, e) in a.edges().iter().enumerate() {
            out[e.letter.0][e.from].push((i, e.to as u32));
        }
        let ids = |c| al.letters_of(c).into_iter().map(|l| l.0).collect();
        Coupled {
            a,
            out,
            internal: ids(LetterClass::Internal),
            calls: ids(LetterClass::Call),
            returns: ids(LetterClass::Return),
            prime_memo: HashMap::new(),
            dyck_memo: HashMap::new(),
        }
    }

    /// All ways of taking one `letter` edge per coordinate:
    /// `(edges, targets)`.
    fn choices(&self, letter: usize, from: &[u32]) -> Vec<(Vec<usize>, Vec<u32>)> {
        let mut acc: Vec<(Vec<usize>, Vec<u32>)> = vec![(Vec::new(), Vec::new())];
        for &p in from {
            let opts = &self.out[letter][p as usize];
            if opts.is_empty() {
                return Vec::new();
            }
            let mut next = Vec::with_capacity(acc.len() * opts.len());
            for (es, ts) in &acc {
                for &(e, t) in opts {
                    let mut es2 = es.clone();
                    es2.push(e);
                    let mut ts2 = ts.clone();
                    ts2.push(t);
                    next.push((es2, ts2));
                }
            }
            acc = next;
        }
        acc
    }

    /// Return edges `f_i` from `from[i]` labeled `letter` with
    /// `(calls[i], f_i)` matched, all combinations, as target tuples.
    fn matched_returns(&self, letter: usize, from: &[u32], calls: &[usize]) -> Vec<Tuple> {
        let mut acc: Vec<Vec<u32>> = vec![Vec::new()];
        for (i, &p) in from.iter().enumerate() {
            let opts: Vec<u32> = self.out[letter][p as usize]
                .iter()
                .filter(|(f, _)| self.a.is_matched(calls[i], *f))
                .map(|&(_, t)| t)
                .collect();
            if opts.is_empty() {
                return Vec::new();
            }
            let mut next = Vec::with_capacity(acc.len() * opts.len());
            for ts in &acc {
                for &t in &opts {
                    let mut ts2 = ts.clone();
                    ts2.push(t);
                    next.push(ts2);
                }
            }
            acc = next;
        }
        acc.into_iter().map(Vec::into_boxed_slice).collect()
    }

    /// One-letter coupled step over the letters of `class`.
    pub fn letter_step(&self, class: LetterClass, from: &[u32]) -> Result<TupleMap> {
        let letters = match class {
            LetterClass::Internal => &self.internal,
            LetterClass::Call => &self.calls,
            LetterClass::Return => &self.returns,
        };
        let mut m = TupleMap::new();
        for &l in letters {
            for (_, ts) in self.choices(l, from) {
                add_into(&mut m, ts.into_boxed_slice(), 1)?;
            }
        }
        Ok(m)
    }

    fn canonical(t: &[u32]) -> (Tuple, Vec<usize>) {
        let mut perm: Vec<usize> = (0..t.len()).collect();
        perm.sort_by_key(|&i| t[i]);
        let sorted: Tuple = perm.iter().map(|&i| t[i]).collect();
        (sorted, perm)
    }

    fn unpermute(m: &TupleMap, perm: &[usize]) -> TupleMap {
        m.iter()
            .map(|(s, &v)| {
                let mut out = vec![0u32; s.len()];
                for (i, &p) in perm.iter().enumerate() {
                    out[p] = s[i];
                }
                (out.into_boxed_slice(), v)
            })
            .collect()
    }

    fn is_identity(perm: &[usize]) -> bool {
        perm.iter().enumerate().all(|(i, &p)| i == p)
    }

    pub fn prime(&mut self, from: &[u32], d: usize) -> Result<Rc<TupleMap>> {
        let (sorted, perm) = Self::canonical(from);
        let m = self.prime_sorted(sorted, d)?;
        if Self::is_identity(&perm) {
            Ok(m)
        } else {
            Ok(Rc::new(Self::unpermute(&m, &perm)))
        }
    }

    pub fn dyck(&mut self, from: &[u32], d: usize) -> Result<Rc<TupleMap>> {
        let (sorted, perm) = Self::canonical(from);
        let m = self.dyck_sorted(sorted, d)?;
        if Self::is_identity(&perm) {
            Ok(m)
        } else {
            Ok(Rc::new(Self::unpermute(&m, &perm)))
        }
    }

    fn prime_sorted(&mut self, from: Tuple, d: usize) -> Result<Rc<TupleMap>> {
        let key = (from.clone(), d);
        if let Some(m) = self.prime_memo.get(&key) {
            return Ok(m.clone());
        }
        let mut m = TupleMap::new();
        if d == 1 {
            m = self.letter_step(LetterClass::Internal, &from)?;
        } else if d >= 2 {
            let calls = self.calls.clone();
            let returns = self.returns.clone();
            for a in calls {
                for (cs, us) in self.choices(a, &from) {
                    let inner = self.dyck(&us, d - 2)?;
                    for (vs, &cnt) in inner.iter() {
                        for &b in &returns {
                            for ss in self.matched_returns(b, vs, &cs) {
                                add_into(&mut m, ss, cnt)?;
                            }
                        }
                    }
                }
            }
        }
        let m = Rc::new(m);
        self.prime_memo.insert(key, m.clone());
        Ok(m)
    }

    fn dyck_sorted(&mut self, from: Tuple, d: usize) -> Result<Rc<TupleMap>> {
        let key = (from.clone(), d);
        if let Some(m) = self.dyck_memo.get(&key) {
            return Ok(m.clone());
        }
        let mut m = TupleMap::new();
        if d == 0 {
            m.insert(from.clone(), 1);
        } else {
            for j in 1..=d {
                let first = self.prime(&from, j)?;
                for (mid, &c1) in first.iter() {
                    let rest = self.dyck(mid, d - j)?;
                    for (to, &c2) in rest.iter() {
                        add_into(&mut m, to.clone(), c1.checked_mul(c2).ok_or_else(overflow)?)?;
                    }
                }
            }
        }
        let m = Rc::new(m);
        self.dyck_memo.insert(key, m.clone());
        Ok(m)
    }
}

/// A square matrix over sorted tuples of distinct states with integer
/// series entries (stored sparsely).
#[derive(Clone, Debug, PartialEq)]
pub struct SignedTupleMatrix {
    pub tuples: Vec<Vec<StateId>>,
    pub order: usize,
    entries: BTreeMap<(usize, usize), Vec<i128>>,
}

impl SignedTupleMatrix {
    fn new(tuples: Vec<Vec<StateId>>, order: usize) -> Self {
        SignedTupleMatrix { tuples, order, entries: BTreeMap::new() }
    }

    pub fn dim(&self) -> usize {
        self.tuples.len()
    }

    fn add(&mut self, i: usize, j: usize, deg: usize, v: i128) -> Result<()> {
        if deg > self.order || v == 0 {
            return Ok(());
        }
        let order = self.order;
        let e = self.entries.entry((i, j)).or_insert_with(|| vec![0; order + 1]);
        e[deg] = e[deg].checked_add(v).ok_or_else(overflow)?;
        Ok(())
    }

    pub fn entry(&self, i: usize, j: usize) -> Series {
        match self.entries.get(&(i, j)) {
            Some(c) => Series::from_coeffs(c.iter().map(|&x| q(x)).collect(), self.order),
            None => Series::zero(self.order),
        }
    }

    pub fn to_matrix(&self) -> Matrix {
        Matrix::from_fn(self.dim(), self.order, |i, j| self.entry(i, j))
    }

    pub fn plus(&self, other: &SignedTupleMatrix) -> Result<SignedTupleMatrix> {
        let mut out = self.clone();
        for (&(i, j), c) in &other.entries {
            for (d, &v) in c.iter().enumerate() {
                out.add(i, j, d, v)?;
            }
        }
        Ok(out)
    }

    /// Principal submatrix on the tuples drawn from `states`.
    pub fn restrict(&self, states: &[StateId]) -> SignedTupleMatrix {
        let keep: Vec<usize> =
            (0..self.dim()).filter(|&i| self.tuples[i].iter().all(|s| states.contains(s))).collect();
        let pos: HashMap<usize, usize> = keep.iter().enumerate().map(|(k, &i)| (i, k)).collect();
        let mut out = SignedTupleMatrix::new(keep.iter().map(|&i| self.tuples[i].clone()).collect(), self.order);
        for (&(i, j), c) in &self.entries {
            if let (Some(&a), Some(&b)) = (pos.get(&i), pos.get(&j)) {
                out.entries.insert((a, b), c.clone());
            }
        }
        out
    }

    pub fn index_of(&self, t: &[StateId]) -> Option<usize> {
        self.tuples.iter().position(|x| x == t)
    }

    /// `det(I - self)`, block by block over the strongly connected
    /// components of the support graph.
    pub fn det_one_minus(&self) -> Result<Series> {
        let n = self.dim();
        let mut adj = vec![Vec::new(); n];
        for (&(i, j), c) in &self.entries {
            if c.iter().any(|&x| x != 0) {
                adj[i].push(j);
            }
        }
        let mut det = Series::one(self.order);
        for comp in strongly_connected_components(n, &adj) {
            if comp.len() == 1 && !adj[comp[0]].contains(&comp[0]) {
                continue;
            }
            let block = match self.block_det_int(&comp) {
                Some(d) => Series::from_coeffs(d.into_iter().map(q).collect(), self.order),
                None => self.block_det_exact(&comp)?,
            };
            det = &det * &block;
        }
        Ok(det)
    }

    /// Elimination with machine integers; every pivot has constant term 1,
    /// so everything stays integral. `None` on overflow.
    fn block_det_int(&self, comp: &[usize]) -> Option<Vec<i128>> {
        let k = comp.len();
        let o = self.order;
        let mut m: Vec<Vec<i128>> = vec![vec![0; o + 1]; k * k];
        for (a, &i) in comp.iter().enumerate() {
            for (b, &j) in comp.iter().enumerate() {
                let cell = &mut m[a * k + b];
                if let Some(c) = self.entries.get(&(i, j)) {
                    for d in 0..=o {
                        cell[d] = c[d].checked_neg()?;
                    }
                }
                if a == b {
                    cell[0] = cell[0].checked_add(1)?;
                }
            }
        }
        let mul = |x: &[i128], y: &[i128]| -> Option<Vec<i128>> {
            let mut r = vec![0i128; o + 1];
            for (i, &a) in x.iter().enumerate() {
                if a == 0 {
                    continue;
                }
                for (j, &b) in y[..=o - i].iter().enumerate() {
                    if b != 0 {
                        r[i + j] = r[i + j].checked_add(a.checked_mul(b)?)?;
                    }
                }
            }
            Some(r)
        };
        let inv = |x: &[i128]| -> Option<Vec<i128>> {
            // x[0] == 1
            let mut r = vec![0i128; o + 1];
            r[0] = 1;
            for n in 1..=o {
                let mut acc = 0i128;
                for i in 1..=n {
                    acc = acc.checked_add(x[i].checked_mul(r[n - i])?)?;
                }
                r[n] = acc.checked_neg()?;
            }
            Some(r)
        };
        let mut det = vec![0i128; o + 1];
        det[0] = 1;
        for col in 0..k {
            let p = m[col * k + col].clone();
            if p[0] != 1 {
                return None;
            }
            det = mul(&det, &p)?;
            let pinv = inv(&p)?;
            for r in col + 1..k {
                if m[r * k + col].iter().all(|&x| x == 0) {
                    continue;
                }
                let f = mul(&m[r * k + col], &pinv)?;
                for j in col..k {
                    let t = mul(&f, &m[col * k + j])?;
                    let cell = &mut m[r * k + j];
                    for d in 0..=o {
                        cell[d] = cell[d].checked_sub(t[d])?;
                    }
                }
            }
        }
        Some(det)
    }

    fn block_det_exact(&self, comp: &[usize]) -> Result<Series> {
        let m = Matrix::from_fn(comp.len(), self.order, |a, b| self.entry(comp[a], comp[b]));
        m.one_minus().det_elimination()
    }
}

fn combinations(n: usize, k: usize) -> Vec<Vec<StateId>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<StateId>, out: &mut Vec<Vec<StateId>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for s in start..n {
            if n - s < k - cur.len() {
                break;
            }
            cur.push(s);
            go(s + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Exterior powers of one automaton, sharing the coupled memo tables.
pub struct Exterior<'a> {
    a: &'a DyckAutomaton,
    coupled: Coupled<'a>,
    order: usize,
}

impl<'a> Exterior<'a> {
    pub fn new(a: &'a DyckAutomaton, order: usize) -> Self {
        Exterior { a, coupled: Coupled::new(a), order }
    }

    pub fn automaton(&self) -> &DyckAutomaton {
        self.a
    }

    /// `H_{⊗ℓ}` for `H ∈ {C, Mc, Mr}` under the thread-wise rule.
    pub fn matrix(&mut self, h: BaseMatrix, ell: usize) -> Result<SignedTupleMatrix> {
        let all: Vec<StateId> = (0..self.a.num_states()).collect();
        self.matrix_on(h, ell, &all)
    }

    /// `H_{⊗ℓ}` restricted to tuples drawn from `states` (sorted). Paths may
    /// pass through other states; only their endpoints are restricted.
    pub fn matrix_on(&mut self, h: BaseMatrix, ell: usize, states: &[StateId]) -> Result<SignedTupleMatrix> {
        let n = states.len();
        if ell == 0 || ell > n {
            return Err(Error::Precondition(format!("exterior power {ell} outside 1..={n}")));
        }
        let tuples: Vec<Vec<StateId>> =
            combinations(n, ell).into_iter().map(|t| t.into_iter().map(|i| states[i]).collect()).collect();
        let index: HashMap<Vec<StateId>, usize> =
            tuples.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
        let mut m = SignedTupleMatrix::new(tuples.clone(), self.order);
        for (i, p) in tuples.iter().enumerate() {
            let from: Vec<u32> = p.iter().map(|&s| s as u32).collect();
            let by_degree: Vec<(usize, Rc<TupleMap>)> = match h {
                BaseMatrix::C => (1..=self.order)
                    .map(|d| Ok((d, self.coupled.prime(&from, d)?)))
                    .collect::<Result<_>>()?,
                BaseMatrix::Mc => vec![(1, Rc::new(self.coupled.letter_step(LetterClass::Call, &from)?))],
                BaseMatrix::Mr => vec![(1, Rc::new(self.coupled.letter_step(LetterClass::Return, &from)?))],
            };
            for (d, targets) in by_degree {
                for (s, &cnt) in targets.iter() {
                    if let Some((sorted, sign)) = sort_sign(s) {
                        let key: Vec<StateId> = sorted.iter().map(|&x| x as usize).collect();
                        let Some(&j) = index.get(&key) else { continue };
                        let v = i128::try_from(cnt).map_err(|_| overflow())?;
                        m.add(i, j, d, sign * v)?;
                    }
                }
            }
        }
        Ok(m)
    }

    /// `Ĉ` over all ordered `ℓ`-tuples (repeats allowed), densely. Mostly
    /// for inspection; the dimension is `|Q|^ℓ`.
    pub fn coupled_prime_matrix(&mut self, ell: usize) -> Result<(Vec<Vec<StateId>>, Matrix)> {
        let n = self.a.num_states();
        let dim = (n as u128).checked_pow(ell as u32).unwrap_or(u128::MAX);
        if dim > 4096 {
            return Err(Error::TooLarge { what: "coupled tuple space", size: dim, cap: 4096 });
        }
        let mut tuples: Vec<Vec<StateId>> = vec![Vec::new()];
        for _ in 0..ell {
            tuples = tuples
                .into_iter()
                .flat_map(|t| {
                    (0..n).map(move |s| {
                        let mut t2 = t.clone();
                        t2.push(s);
                        t2
                    })
                })
                .collect();
        }
        let index: HashMap<Vec<StateId>, usize> =
            tuples.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
        let mut coeffs: BTreeMap<(usize, usize), Vec<BigRational>> = BTreeMap::new();
        for (i, t) in tuples.iter().enumerate() {
            let from: Vec<u32> = t.iter().map(|&s| s as u32).collect();
            for d in 1..=self.order {
                for (s, &cnt) in self.coupled.prime(&from, d)?.iter() {
                    let key: Vec<StateId> = s.iter().map(|&x| x as usize).collect();
                    let j = index[&key];
                    let e = coeffs.entry((i, j)).or_insert_with(|| vec![q(0); self.order + 1]);
                    e[d] = &e[d] + big(cnt);
                }
            }
        }
        let order = self.order;
        let m = Matrix::from_fn(tuples.len(), order, |i, j| match coeffs.get(&(i, j)) {
            Some(c) => Series::from_coeffs(c.clone(), order),
            None => Series::zero(order),
        });
        Ok((tuples, m))
    }
}

/// `C_{⊗ℓ}` under the index-aligned rule: the exterior automaton is built
/// explicitly on sorted tuples of distinct states and its prime matrix is
/// computed by the signed fixed point.
pub fn index_aligned_prime_matrix(a: &DyckAutomaton, ell: usize, order: usize) -> Result<SignedTupleMatrix> {
    let n = a.num_states();
    if ell == 0 || ell > n {
        return Err(Error::Precondition(format!("exterior power {ell} outside 1..={n}")));
    }
    let tuples = combinations(n, ell);
    let index: HashMap<Vec<StateId>, usize> = tuples.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
    let coupled = Coupled::new(a);
    let al = a.alphabet();
    // exterior edges: (from, to, sign, constituent edges in source order)
    let mut calls: Vec<(usize, usize, i128, Vec<usize>)> = Vec::new();
    let mut rets: Vec<(usize, usize, i128, Vec<usize>)> = Vec::new();
    let mut m = SignedTupleMatrix::new(tuples.clone(), order);
    for (i, p) in tuples.iter().enumerate() {
        let from: Vec<u32> = p.iter().map(|&s| s as u32).collect();
        for l in al.letters() {
            for (es, ts) in coupled.choices(l.0, &from) {
                let Some((sorted, sign)) = sort_sign(&ts) else { continue };
                let key: Vec<StateId> = sorted.iter().map(|&x| x as usize).collect();
                let j = index[&key];
                match al.class(l) {
                    LetterClass::Internal => m.add(i, j, 1, sign)?,
                    LetterClass::Call => calls.push((i, j, sign, es)),
                    LetterClass::Return => rets.push((i, j, sign, es)),
                }
            }
        }
    }
    let pairs: Vec<(usize, usize, usize, usize, i128)> = calls
        .iter()
        .flat_map(|c| rets.iter().map(move |r| (c, r)))
        .filter(|(c, r)| c.3.iter().zip(&r.3).all(|(&e, &f)| a.is_matched(e, f)))
        .map(|(c, r)| (c.0, c.1, r.0, r.1, c.2 * r.2))
        .collect();
    let base = m.to_matrix();
    let z2 = Series::monomial(q(1), 2, order);
    let mut cur = base.clone();
    for _ in 0..=order {
        let d = cur.star()?;
        let mut next = base.clone();
        for &(p, u, v, s, sign) in &pairs {
            let add = (&z2 * d.get(u, v)).scalar_mul(&q(sign));
            let e = next.get(p, s) + &add;
            next.set(p, s, e);
        }
        if next == cur {
            break;
        }
        cur = next;
    }
    let mut out = SignedTupleMatrix::new(tuples, order);
    for i in 0..out.dim() {
        for j in 0..out.dim() {
            for (d, c) in cur.get(i, j).coeffs().iter().enumerate() {
                let v = c.to_integer().to_i128().ok_or_else(overflow)?;
                out.add(i, j, d, v)?;
            }
        }
    }
    Ok(out)
}

fn exterior_c(ext: &mut Exterior<'_>, rule: ExteriorRule, ell: usize, states: &[StateId]) -> Result<SignedTupleMatrix> {
    match rule {
        ExteriorRule::ThreadWise => ext.matrix_on(BaseMatrix::C, ell, states),
        ExteriorRule::IndexAligned => {
            let full = index_aligned_prime_matrix(ext.automaton(), ell, ext.order)?;
            Ok(full.restrict(states))
        }
    }
}

/// `H_{⊗ℓ}` for one of the three base matrices, thread-wise.
pub fn exterior_matrix(a: &DyckAutomaton, h: BaseMatrix, ell: usize, order: usize) -> Result<SignedTupleMatrix> {
    Exterior::new(a, order).matrix(h, ell)
}

fn signed_power(s: &Series, ell: usize) -> Result<Series> {
    s.powi(if ell.is_multiple_of(2) { 1 } else { -1 })
}

/// `Π_ℓ det(I - H_{⊗ℓ})^{(-1)^ℓ}` on `a` as given (no reduction, no
/// trimming). The products `C Mc*` and `Mr* C` use the star of the letter
/// matrix literally.
pub fn zeta_factor(a: &DyckAutomaton, h: Factor, order: usize) -> Result<Series> {
    zeta_factor_with(a, h, order, ExteriorRule::ThreadWise)
}

pub fn zeta_factor_with(a: &DyckAutomaton, h: Factor, order: usize, rule: ExteriorRule) -> Result<Series> {
    let mut ext = Exterior::new(a, order);
    let all: Vec<StateId> = (0..a.num_states()).collect();
    let mut acc = Series::one(order);
    for ell in 1..=a.num_states() {
        let m: Matrix = match h {
            Factor::C => exterior_c(&mut ext, rule, ell, &all)?.to_matrix(),
            Factor::Mc => ext.matrix(BaseMatrix::Mc, ell)?.to_matrix(),
            Factor::Mr => ext.matrix(BaseMatrix::Mr, ell)?.to_matrix(),
            Factor::CMcStar => {
                let c = exterior_c(&mut ext, rule, ell, &all)?.to_matrix();
                let mc = ext.matrix(BaseMatrix::Mc, ell)?.to_matrix();
                c.checked_mul(&mc.star()?)?
            }
            Factor::MrStarC => {
                let c = exterior_c(&mut ext, rule, ell, &all)?.to_matrix();
                let mr = ext.matrix(BaseMatrix::Mr, ell)?.to_matrix();
                mr.star()?.checked_mul(&c)?
            }
        };
        let det = m.one_minus().det()?;
        acc = &acc * &signed_power(&det, ell)?;
    }
    Ok(acc)
}

/// Determinants needed from one side, per `ℓ`.
struct SideDets {
    c: Vec<Series>,
    letter: Vec<Series>,
    letter_plus_c: Vec<Series>,
}

/// States on a cycle of the support graph of `m`. Every cycle of a tuple
/// graph built over `m` projects onto such cycles coordinatewise.
pub fn cyclic_support(m: &Matrix) -> Vec<StateId> {
    let n = m.dim();
    let adj: Vec<Vec<usize>> = (0..n).map(|i| (0..n).filter(|&j| !m.get(i, j).is_zero()).collect()).collect();
    let mut keep = Vec::new();
    for comp in strongly_connected_components(n, &adj) {
        if comp.len() > 1 || adj[comp[0]].contains(&comp[0]) {
            keep.extend(comp);
        }
    }
    keep.sort_unstable();
    keep
}

/// Supports that matter on one side: `C`, the letter matrix, and their sum.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SideSupport {
    pub c: Vec<StateId>,
    pub letter: Vec<StateId>,
    pub combined: Vec<StateId>,
}

pub fn side_support(a: &DyckAutomaton, letters: LetterClass, order: usize) -> Result<SideSupport> {
    let c = prime_matrix(a, order)?;
    let l = letter_matrix(a, letters, order);
    Ok(SideSupport { c: cyclic_support(&c), letter: cyclic_support(&l), combined: cyclic_support(&c.checked_add(&l)?) })
}

fn side_dets(
    a: &DyckAutomaton,
    letters: BaseMatrix,
    order: usize,
    rule: ExteriorRule,
    cap: usize,
) -> Result<(SideDets, SideSupport)> {
    let class = if letters == BaseMatrix::Mc { LetterClass::Call } else { LetterClass::Return };
    let support = side_support(a, class, order)?;
    let states = &support.combined;
    if states.len() > cap {
        return Err(Error::TooLarge {
            what: "cyclic support for exterior powers",
            size: states.len() as u128,
            cap: cap as u128,
        });
    }
    let mut ext = Exterior::new(a, order);
    let mut out = SideDets { c: Vec::new(), letter: Vec::new(), letter_plus_c: Vec::new() };
    for ell in 1..=states.len() {
        let c = exterior_c(&mut ext, rule, ell, states)?;
        let m = ext.matrix_on(letters, ell, states)?;
        out.c.push(c.det_one_minus()?);
        out.letter.push(m.det_one_minus()?);
        out.letter_plus_c.push(m.plus(&c)?.det_one_minus()?);
    }
    Ok((out, support))
}

fn assemble(dets: &[Series], order: usize) -> Result<Series> {
    let mut acc = Series::one(order);
    for (k, d) in dets.iter().enumerate() {
        acc = &acc * &signed_power(d, k + 1)?;
    }
    Ok(acc)
}

fn assemble_quotient(num: &[Series], den: &[Series], order: usize) -> Result<Series> {
    let mut acc = Series::one(order);
    for (k, (n, d)) in num.iter().zip(den).enumerate() {
        let ratio = n.checked_div(d)?;
        acc = &acc * &signed_power(&ratio, k + 1)?;
    }
    Ok(acc)
}

fn core_of(a: &DyckAutomaton, cap: usize) -> Result<DyckAutomaton> {
    let core = a.cyclic_core();
    if core.num_states() > cap {
        return Err(Error::TooLarge {
            what: "automaton core for exterior powers",
            size: core.num_states() as u128,
            cap: cap as u128,
        });
    }
    Ok(core)
}

/// `p_n = n [z^n] log ζ` for `n = 1..=N`.
pub fn periodic_from_zeta(z: &Series) -> Result<Vec<BigRational>> {
    let log = z.log()?;
    Ok((1..=z.order()).map(|n| log.coeff(n) * q(n as i128)).collect())
}

pub fn zeta(a: &DyckAutomaton, order: usize, opts: &ZetaOptions) -> Result<ZetaResult> {
    if order < 1 {
        return Err(Error::Precondition("truncation order must be at least 1".into()));
    }
    let (left, right, ls, rs) = if opts.reduce {
        let l = left_reduce(a);
        let r = right_reduce(a);
        let (ls, rs) = (l.automaton.num_states(), r.automaton.num_states());
        (l.automaton, r.automaton, ls, rs)
    } else {
        (a.clone(), a.clone(), a.num_states(), a.num_states())
    };
    let lcore = left.cyclic_core();
    let rcore = right.cyclic_core();
    if opts.rule == ExteriorRule::IndexAligned {
        core_of(&lcore, opts.state_cap)?;
        core_of(&rcore, opts.state_cap)?;
    }
    let (l, lsupport) = side_dets(&lcore, BaseMatrix::Mc, order, opts.rule, opts.state_cap)?;
    let (r, rsupport) = side_dets(&rcore, BaseMatrix::Mr, order, opts.rule, opts.state_cap)?;
    let zc = assemble(&l.c, order)?;
    if opts.cross_check_c {
        let zc_right = assemble(&r.c, order)?;
        if zc_right != zc {
            return Err(Error::Mismatch(format!(
                "ζ_C differs between reductions: left {zc}, right {zc_right}"
            )));
        }
    }
    let mut factors = BTreeMap::new();
    factors.insert(Factor::C, zc.clone());
    factors.insert(Factor::Mc, assemble(&l.letter, order)?);
    factors.insert(Factor::CMcStar, assemble_quotient(&l.letter_plus_c, &l.letter, order)?);
    factors.insert(Factor::Mr, assemble(&r.letter, order)?);
    factors.insert(Factor::MrStarC, assemble_quotient(&r.letter_plus_c, &r.letter, order)?);
    let num = &(&factors[&Factor::CMcStar] * &factors[&Factor::MrStarC])
        * &(&factors[&Factor::Mc] * &factors[&Factor::Mr]);
    let z = num.checked_div(&zc)?;
    let periodic = periodic_from_zeta(&z)?;
    Ok(ZetaResult {
        order,
        zeta: z,
        factors,
        periodic,
        left_states: ls,
        right_states: rs,
        left_core: lcore.num_states(),
        right_core: rcore.num_states(),
        left_support: lsupport,
        right_support: rsupport,
        caller_asserted: !opts.reduce,
    })
}

/// Generating series of admissible paths leaving `start`, by length:
/// `e_start^T (C + Mr)^* (I + Mc (C + Mc)^*) 1`. On a left reduction from
/// its initial state this counts admissible labels.
pub fn path_count_series(a: &DyckAutomaton, start: StateId, order: usize) -> Result<Series> {
    let n = a.num_states();
    let c = prime_matrix(a, order)?;
    let mc = letter_matrix(a, LetterClass::Call, order);
    let mr = letter_matrix(a, LetterClass::Return, order);
    let left = c.checked_add(&mr)?.star()?;
    let right = Matrix::identity(n, order).checked_add(&mc.checked_mul(&c.checked_add(&mc)?.star()?)?)?;
    let prod = left.checked_mul(&right)?;
    let mut s = Series::zero(order);
    for j in 0..n {
        s = &s + prod.get(start, j);
    }
    Ok(s)
}

/// Converts an exact series to `i128` coefficients when possible.
pub fn integer_coeffs(s: &Series) -> Option<Vec<i128>> {
    s.coeffs()
        .iter()
        .map(|c| if c.is_integer() { c.to_integer().to_i128() } else { None })
        .collect()
}

/// Whether a [`SignedTupleMatrix`] is the zero matrix.
pub fn is_zero_matrix(m: &SignedTupleMatrix) -> bool {
    m.entries.values().all(|c| c.iter().all(Zero::is_zero))
}
