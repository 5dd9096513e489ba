//! Bridges between Dyck automata and neighbouring formalisms: finite-type
//! Dyck shifts, proper block maps, visibly pushdown automata and visibly
//! pushdown grammars.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::automaton::{AlphabetFile, Diagnostic, DiagnosticKind, DyckAutomaton, Edge, StateId};
use crate::error::{Error, Result};
use crate::words::{Letter, LetterClass, PushdownAlphabet};

/// Largest number of windows any construction here will enumerate.
pub const WINDOW_CAP: u128 = 1_000_000;

fn input(msg: impl Into<String>) -> Error {
    Error::Input(msg.into())
}

/// Collects edges, merging repeated `(from, letter, to)` triples. A merged
/// edge inherits the matched partners of all its copies, which leaves the
/// set of admissible labels unchanged.
#[derive(Default)]
struct Builder {
    states: Vec<String>,
    state_ix: HashMap<String, StateId>,
    edges: Vec<Edge>,
    edge_ix: HashMap<Edge, usize>,
    matched: BTreeSet<(usize, usize)>,
}

impl Builder {
    fn state(&mut self, name: String) -> StateId {
        if let Some(&s) = self.state_ix.get(&name) {
            return s;
        }
        let s = self.states.len();
        self.states.push(name.clone());
        self.state_ix.insert(name, s);
        s
    }

    fn edge(&mut self, from: StateId, letter: Letter, to: StateId) -> usize {
        let e = Edge { from, letter, to };
        if let Some(&i) = self.edge_ix.get(&e) {
            return i;
        }
        self.edges.push(e);
        self.edge_ix.insert(e, self.edges.len() - 1);
        self.edges.len() - 1
    }

    fn finish(self, alphabet: PushdownAlphabet) -> Result<DyckAutomaton> {
        DyckAutomaton::new(alphabet, self.states, self.edges, self.matched)
    }
}

fn all_words(k: usize, len: usize) -> Result<Vec<Vec<Letter>>> {
    let size = (k as u128).checked_pow(len as u32).unwrap_or(u128::MAX);
    if size > WINDOW_CAP {
        return Err(Error::TooLarge { what: "window enumeration", size, cap: WINDOW_CAP });
    }
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|w| {
                (0..k).map(move |l| {
                    let mut w2 = w.clone();
                    w2.push(Letter(l));
                    w2
                })
            })
            .collect();
    }
    Ok(out)
}

fn contains_factor(w: &[Letter], f: &[Letter]) -> bool {
    f.is_empty() || w.windows(f.len()).any(|x| x == f)
}

/// Copies `a` onto `target`, renaming letters by `map`. The map must
/// preserve letter classes.
pub fn relabel(a: &DyckAutomaton, target: &PushdownAlphabet, map: impl Fn(Letter) -> Letter) -> Result<DyckAutomaton> {
    let mut b = Builder::default();
    for s in a.states() {
        b.state(s.clone());
    }
    let mut image = Vec::with_capacity(a.edges().len());
    for e in a.edges() {
        let l = map(e.letter);
        if l.0 >= target.len() || target.class(l) != a.alphabet().class(e.letter) {
            return Err(input(format!(
                "letter `{}` is not sent to a {} letter",
                a.alphabet().name(e.letter),
                a.alphabet().class(e.letter)
            )));
        }
        image.push(b.edge(e.from, l, e.to));
    }
    b.matched = a.matched().iter().map(|&(c, r)| (image[c], image[r])).collect();
    b.finish(target.clone())
}

/// A position in a word with fixed-length context on each side.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Window {
    pub left: Vec<Letter>,
    pub letter: Letter,
    pub right: Vec<Letter>,
}

impl Window {
    /// `self ⪯ other`: left context a suffix, right context a prefix.
    pub fn below(&self, other: &Window) -> bool {
        self.letter == other.letter && other.left.ends_with(&self.left) && other.right.starts_with(&self.right)
    }
}

/// A finite-type-Dyck shift: sequences avoiding the factors in `forbidden`
/// and the call/return window pairs in `unmatchable`.
///
/// Shorter entries stand for all their extensions: a forbidden word for
/// every window of length `m + n` containing it, an unmatchable window for
/// every window it lies below. Left contexts have length at most `m` and
/// right contexts at most `n - 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FtdSpec {
    pub alphabet: PushdownAlphabet,
    pub m: usize,
    pub n: usize,
    pub forbidden: BTreeSet<Vec<Letter>>,
    pub unmatchable: BTreeSet<(Window, Window)>,
}

impl FtdSpec {
    pub fn new(
        alphabet: PushdownAlphabet,
        m: usize,
        n: usize,
        forbidden: BTreeSet<Vec<Letter>>,
        unmatchable: BTreeSet<(Window, Window)>,
    ) -> Result<Self> {
        let spec = FtdSpec { alphabet, m, n, forbidden, unmatchable };
        spec.check()?;
        Ok(spec)
    }

    fn check(&self) -> Result<()> {
        if self.m == 0 || self.n == 0 {
            return Err(input("window lengths m and n must be positive"));
        }
        let al = &self.alphabet;
        for w in &self.forbidden {
            if w.is_empty() || w.len() > self.m + self.n {
                return Err(input(format!("forbidden word `{}` longer than m + n", al.render(w))));
            }
        }
        for (c, r) in &self.unmatchable {
            for (w, class) in [(c, LetterClass::Call), (r, LetterClass::Return)] {
                if al.class(w.letter) != class {
                    return Err(input(format!("`{}` in an unmatchable pair is not a {class}", al.name(w.letter))));
                }
                if w.left.len() > self.m || w.right.len() + 1 > self.n {
                    return Err(input("unmatchable window context too long"));
                }
            }
        }
        Ok(())
    }

    pub fn allows_window(&self, w: &[Letter]) -> bool {
        !self.forbidden.iter().any(|f| contains_factor(w, f))
    }

    pub fn allows_pair(&self, call: &Window, ret: &Window) -> bool {
        !self.unmatchable.iter().any(|(c, r)| c.below(call) && r.below(ret))
    }

    fn letter_list(&self, names: &[String]) -> Result<Vec<Letter>> {
        names.iter().map(|n| self.alphabet.letter(n)).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowFile {
    #[serde(default)]
    pub left: Vec<String>,
    pub letter: String,
    #[serde(default)]
    pub right: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairFile {
    pub call: WindowFile,
    #[serde(rename = "return")]
    pub ret: WindowFile,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockMapFile {
    pub target: AlphabetFile,
    pub m: usize,
    pub n: usize,
    /// Window (letters separated by spaces) to target letter.
    pub table: BTreeMap<String, String>,
}

/// On-disk form of an [`FtdSpec`], optionally with a block map whose image
/// is wanted instead of the shift itself. Words are space-separated.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FtdFile {
    pub alphabet: AlphabetFile,
    pub m: usize,
    pub n: usize,
    #[serde(default)]
    pub forbidden: Vec<String>,
    #[serde(default)]
    pub unmatchable: Vec<PairFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub block_map: Option<BlockMapFile>,
}

impl FtdFile {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn spec(&self) -> Result<FtdSpec> {
        let alphabet = self.alphabet.to_alphabet()?;
        let forbidden = self.forbidden.iter().map(|w| alphabet.parse_word(w).map(|w| w.0)).collect::<Result<_>>()?;
        let mut spec = FtdSpec { alphabet, m: self.m, n: self.n, forbidden, unmatchable: BTreeSet::new() };
        for p in &self.unmatchable {
            let win = |w: &WindowFile| -> Result<Window> {
                Ok(Window {
                    left: spec.letter_list(&w.left)?,
                    letter: spec.alphabet.letter(&w.letter)?,
                    right: spec.letter_list(&w.right)?,
                })
            };
            let pair = (win(&p.call)?, win(&p.ret)?);
            spec.unmatchable.insert(pair);
        }
        spec.check()?;
        Ok(spec)
    }

    pub fn block_map(&self, source: &PushdownAlphabet) -> Result<Option<BlockMapSpec>> {
        let Some(bm) = &self.block_map else { return Ok(None) };
        let target = bm.target.to_alphabet()?;
        let mut table = BTreeMap::new();
        for (k, v) in &bm.table {
            table.insert(source.parse_word(k)?.0, target.letter(v)?);
        }
        BlockMapSpec::new(source.clone(), target, bm.m, bm.n, table).map(Some)
    }

    /// The automaton the file describes: the shift, or its image.
    pub fn build(&self) -> Result<(DyckAutomaton, Vec<Diagnostic>)> {
        let spec = self.spec()?;
        match self.block_map(&spec.alphabet)? {
            None => ftd_to_automaton(&spec),
            Some(bm) => Ok((block_map_image(&spec, &bm)?, Vec::new())),
        }
    }
}

fn window_name(al: &PushdownAlphabet, u: &[Letter], v: &[Letter]) -> String {
    format!("{} | {}", al.render(u), al.render(v))
}

/// Sliding-window presentation: states `(u, v)` with `|u| = m`, `|v| = n`
/// and `uv` allowed; reading the first letter of `v` shifts the window by
/// one. A call and a return edge are matched unless their source windows
/// form an unmatchable pair.
pub fn ftd_to_automaton(spec: &FtdSpec) -> Result<(DyckAutomaton, Vec<Diagnostic>)> {
    spec.check()?;
    let (m, n) = (spec.m, spec.n);
    let al = &spec.alphabet;
    let k = al.len();
    let mut b = Builder::default();
    let windows: Vec<Vec<Letter>> = all_words(k, m + n)?.into_iter().filter(|w| spec.allows_window(w)).collect();
    let ids: HashMap<Vec<Letter>, StateId> =
        windows.iter().map(|w| (w.clone(), b.state(window_name(al, &w[..m], &w[m..])))).collect();
    let mut calls = Vec::new();
    let mut rets = Vec::new();
    for w in &windows {
        let a = w[m];
        for c in 0..k {
            let mut t = w[1..].to_vec();
            t.push(Letter(c));
            let Some(&to) = ids.get(&t) else { continue };
            let e = b.edge(ids[w], a, to);
            let win = Window { left: w[..m].to_vec(), letter: a, right: w[m + 1..].to_vec() };
            match al.class(a) {
                LetterClass::Call => calls.push((e, win)),
                LetterClass::Return => rets.push((e, win)),
                LetterClass::Internal => {}
            }
        }
    }
    for (e, cw) in &calls {
        for (f, rw) in &rets {
            if spec.allows_pair(cw, rw) {
                b.matched.insert((*e, *f));
            }
        }
    }
    let mut diags = Vec::new();
    if windows.is_empty() {
        diags.push(Diagnostic {
            kind: DiagnosticKind::EmptyStateSet,
            message: "every window is forbidden; the shift is empty".into(),
        });
    }
    Ok((b.finish(al.clone())?, diags))
}

/// The finite-type-Dyck shift of admissible edge sequences of an automaton,
/// with the map sending each edge to its label.
#[derive(Clone, Debug)]
pub struct EdgeFtd {
    pub spec: FtdSpec,
    /// Label of each edge letter, indexed by the edge letter.
    pub labels: Vec<Letter>,
}

impl EdgeFtd {
    /// The automaton presenting the image of the edge shift under the
    /// labeling map.
    pub fn image(&self, source: &DyckAutomaton) -> Result<DyckAutomaton> {
        let (edges, _) = ftd_to_automaton(&self.spec)?;
        relabel(&edges, source.alphabet(), |l| self.labels[l.0])
    }
}

pub fn edge_ftd(a: &DyckAutomaton) -> Result<EdgeFtd> {
    let mut names: BTreeMap<LetterClass, Vec<String>> = BTreeMap::new();
    let mut order = Vec::new();
    for class in [LetterClass::Call, LetterClass::Return, LetterClass::Internal] {
        for (i, _) in a.edges().iter().enumerate().filter(|(i, _)| a.edge_class(*i) == class) {
            names.entry(class).or_default().push(format!("e{i}"));
            order.push(i);
        }
    }
    if order.is_empty() {
        return Err(input("automaton has no edges"));
    }
    let get = |c| names.get(&c).cloned().unwrap_or_default();
    let alphabet = PushdownAlphabet::new(&get(LetterClass::Call), &get(LetterClass::Return), &get(LetterClass::Internal))?;
    // edge i is letter pos[i]
    let mut pos = vec![Letter(0); a.edges().len()];
    for (l, &i) in order.iter().enumerate() {
        pos[i] = Letter(l);
    }
    let mut forbidden = BTreeSet::new();
    for (i, e) in a.edges().iter().enumerate() {
        for (j, f) in a.edges().iter().enumerate() {
            if e.to != f.from {
                forbidden.insert(vec![pos[i], pos[j]]);
            }
        }
    }
    let mut unmatchable = BTreeSet::new();
    for (i, _) in a.edges().iter().enumerate().filter(|(i, _)| a.edge_class(*i) == LetterClass::Call) {
        for (j, _) in a.edges().iter().enumerate().filter(|(j, _)| a.edge_class(*j) == LetterClass::Return) {
            if !a.is_matched(i, j) {
                let w = |l| Window { left: Vec::new(), letter: l, right: Vec::new() };
                unmatchable.insert((w(pos[i]), w(pos[j])));
            }
        }
    }
    let labels = order.iter().map(|&i| a.edge(i).letter).collect();
    Ok(EdgeFtd { spec: FtdSpec::new(alphabet, 1, 1, forbidden, unmatchable)?, labels })
}

/// A proper `(m, n)`-block map given by its local rule on windows of length
/// `m + n + 1`; the image letter sits at position `m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockMapSpec {
    pub source: PushdownAlphabet,
    pub target: PushdownAlphabet,
    pub m: usize,
    pub n: usize,
    pub table: BTreeMap<Vec<Letter>, Letter>,
}

impl BlockMapSpec {
    pub fn new(
        source: PushdownAlphabet,
        target: PushdownAlphabet,
        m: usize,
        n: usize,
        table: BTreeMap<Vec<Letter>, Letter>,
    ) -> Result<Self> {
        for w in all_words(source.len(), m + n + 1)? {
            let Some(&y) = table.get(&w) else {
                return Err(input(format!("block map has no entry for `{}`", source.render(&w))));
            };
            if y.0 >= target.len() {
                return Err(input("block map target letter out of range"));
            }
            if target.class(y) != source.class(w[m]) {
                return Err(input(format!(
                    "block map is not proper: `{}` has a {} center but maps to the {} letter `{}`",
                    source.render(&w),
                    source.class(w[m]),
                    target.class(y),
                    target.name(y)
                )));
            }
        }
        if table.len() as u128 != (source.len() as u128).pow((m + n + 1) as u32) {
            return Err(input("block map table has entries of the wrong length"));
        }
        Ok(BlockMapSpec { source, target, m, n, table })
    }

    /// A 1-block map from a letter map.
    pub fn letter_map(source: PushdownAlphabet, target: PushdownAlphabet, map: impl Fn(Letter) -> Letter) -> Result<Self> {
        let table = source.letters().map(|l| (vec![l], map(l))).collect();
        Self::new(source, target, 0, 0, table)
    }

    /// Image of the letter at position `center` of `w`, which must leave at
    /// least `m` letters before and `n` after.
    pub fn apply(&self, w: &[Letter], center: usize) -> Letter {
        self.table[&w[center - self.m..=center + self.n]]
    }
}

/// The product automaton over pairs `(x, φ(window))`: it presents the
/// graph of the block map restricted to the shift.
pub fn block_map_product(spec: &FtdSpec, bm: &BlockMapSpec) -> Result<(DyckAutomaton, Vec<(Letter, Letter)>)> {
    spec.check()?;
    if bm.source != spec.alphabet {
        return Err(input("block map source alphabet differs from the shift alphabet"));
    }
    // windows must see both the block map and the constraints
    let m = bm.m.max(spec.m).max(1);
    let n = bm.n.max(spec.n).max(1);
    let al = &spec.alphabet;
    let k = al.len();
    let mut pairs: Vec<(Letter, Letter)> = Vec::new();
    let mut pair_ix: HashMap<(Letter, Letter), Letter> = HashMap::new();
    let mut b = Builder::default();
    let mut raw = Vec::new();
    for w in all_words(k, m + n + 1)? {
        if !spec.allows_window(&w) {
            continue;
        }
        let x = w[m];
        let y = bm.apply(&w, m);
        let l = *pair_ix.entry((x, y)).or_insert_with(|| {
            pairs.push((x, y));
            Letter(pairs.len() - 1)
        });
        let from = b.state(window_name(al, &w[..m], &w[m..m + n]));
        let to = b.state(window_name(al, &w[1..m + 1], &w[m + 1..]));
        let win = Window { left: w[..m].to_vec(), letter: x, right: w[m + 1..].to_vec() };
        raw.push((from, l, to, win));
    }
    pairs.sort_by_key(|&(x, y)| (al.class(x), x, y));
    let remap: HashMap<Letter, Letter> =
        pairs.iter().enumerate().map(|(i, p)| (pair_ix[p], Letter(i))).collect();
    let mut by_class: BTreeMap<LetterClass, Vec<String>> = BTreeMap::new();
    for &(x, y) in &pairs {
        by_class.entry(al.class(x)).or_default().push(format!("{}/{}", al.name(x), bm.target.name(y)));
    }
    let get = |c| by_class.get(&c).cloned().unwrap_or_default();
    let alphabet = PushdownAlphabet::new(&get(LetterClass::Call), &get(LetterClass::Return), &get(LetterClass::Internal))?;
    let mut calls = Vec::new();
    let mut rets = Vec::new();
    for (from, l, to, win) in raw {
        let e = b.edge(from, remap[&l], to);
        match al.class(win.letter) {
            LetterClass::Call => calls.push((e, win)),
            LetterClass::Return => rets.push((e, win)),
            LetterClass::Internal => {}
        }
    }
    for (e, cw) in &calls {
        for (f, rw) in &rets {
            if spec.allows_pair(cw, rw) {
                b.matched.insert((*e, *f));
            }
        }
    }
    Ok((b.finish(alphabet)?, pairs))
}

/// Image of the shift under the block map, presented by projecting the
/// product automaton (pruned to states on bi-infinite paths) onto its
/// second components.
pub fn block_map_image(spec: &FtdSpec, bm: &BlockMapSpec) -> Result<DyckAutomaton> {
    let (product, pairs) = block_map_product(spec, bm)?;
    let pruned = product.induced(&product.biinfinite_states());
    relabel(&pruned, &bm.target, |l| pairs[l.0].1)
}

/// Stack symbols of [`Vpa`]; pushed symbols are call edges of the source
/// automaton.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum StackSymbol {
    Bottom,
    Call(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Push {
    pub from: StateId,
    pub letter: Letter,
    pub to: StateId,
    pub symbol: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Pop {
    pub from: StateId,
    pub letter: Letter,
    pub symbol: StackSymbol,
    pub to: StateId,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Local {
    pub from: StateId,
    pub letter: Letter,
    pub to: StateId,
}

/// A visibly pushdown automaton. The bottom symbol is never pushed and
/// popping it leaves it in place.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vpa {
    pub alphabet: PushdownAlphabet,
    pub states: Vec<String>,
    pub initial: BTreeSet<StateId>,
    pub accepting: BTreeSet<StateId>,
    /// Names of the non-bottom stack symbols.
    pub stack: Vec<String>,
    pub push: Vec<Push>,
    pub pop: Vec<Pop>,
    pub local: Vec<Local>,
}

/// Every state is initial and final; calls push their own edge, matched
/// returns pop it, and any return may fire on the bare bottom symbol.
pub fn to_vpa(a: &DyckAutomaton) -> Vpa {
    let all: BTreeSet<StateId> = (0..a.num_states()).collect();
    let mut stack_ix = HashMap::new();
    let mut stack = Vec::new();
    let mut push = Vec::new();
    let mut pop = Vec::new();
    let mut local = Vec::new();
    for (i, e) in a.edges().iter().enumerate() {
        match a.edge_class(i) {
            LetterClass::Call => {
                stack_ix.insert(i, stack.len());
                push.push(Push { from: e.from, letter: e.letter, to: e.to, symbol: stack.len() });
                stack.push(a.describe_edge(i));
            }
            LetterClass::Return => pop.push(Pop { from: e.from, letter: e.letter, symbol: StackSymbol::Bottom, to: e.to }),
            LetterClass::Internal => local.push(Local { from: e.from, letter: e.letter, to: e.to }),
        }
    }
    for &(c, r) in a.matched() {
        let e = a.edge(r);
        pop.push(Pop { from: e.from, letter: e.letter, symbol: StackSymbol::Call(stack_ix[&c]), to: e.to });
    }
    pop.sort();
    Vpa {
        alphabet: a.alphabet().clone(),
        states: a.states().to_vec(),
        initial: all.clone(),
        accepting: all,
        stack,
        push,
        pop,
        local,
    }
}

/// Whether some accepting run reads `w`, simulating all configurations.
pub fn vpa_run(v: &Vpa, w: &[Letter]) -> bool {
    let mut configs: BTreeSet<(StateId, Vec<usize>)> = v.initial.iter().map(|&s| (s, Vec::new())).collect();
    for &l in w {
        let mut next = BTreeSet::new();
        for (s, st) in &configs {
            match v.alphabet.class(l) {
                LetterClass::Call => {
                    for t in v.push.iter().filter(|t| t.from == *s && t.letter == l) {
                        let mut st2 = st.clone();
                        st2.push(t.symbol);
                        next.insert((t.to, st2));
                    }
                }
                LetterClass::Return => {
                    for t in v.pop.iter().filter(|t| t.from == *s && t.letter == l) {
                        match (t.symbol, st.last()) {
                            (StackSymbol::Bottom, None) => {
                                next.insert((t.to, Vec::new()));
                            }
                            (StackSymbol::Call(g), Some(&top)) if g == top => {
                                next.insert((t.to, st[..st.len() - 1].to_vec()));
                            }
                            _ => {}
                        }
                    }
                }
                LetterClass::Internal => {
                    for t in v.local.iter().filter(|t| t.from == *s && t.letter == l) {
                        next.insert((t.to, st.clone()));
                    }
                }
            }
        }
        if next.is_empty() {
            return false;
        }
        configs = next;
    }
    configs.iter().any(|(s, _)| v.accepting.contains(s))
}

pub const BOTTOM: &str = "⊥";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PushFile {
    pub from: String,
    pub label: String,
    pub to: String,
    pub push: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PopFile {
    pub from: String,
    pub label: String,
    pub pop: String,
    pub to: String,
}

/// On-disk form of a [`Vpa`], with names throughout.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VpaFile {
    pub alphabet: AlphabetFile,
    pub states: Vec<String>,
    pub initial: Vec<String>,
    #[serde(rename = "final")]
    pub accepting: Vec<String>,
    pub bottom: String,
    pub stack: Vec<String>,
    pub push: Vec<PushFile>,
    pub pop: Vec<PopFile>,
    pub local: Vec<crate::automaton::EdgeFile>,
}

impl From<&Vpa> for VpaFile {
    fn from(v: &Vpa) -> Self {
        let st = |s: StateId| v.states[s].clone();
        let lt = |l: Letter| v.alphabet.name(l).to_string();
        VpaFile {
            alphabet: AlphabetFile::from_alphabet(&v.alphabet),
            states: v.states.clone(),
            initial: v.initial.iter().map(|&s| st(s)).collect(),
            accepting: v.accepting.iter().map(|&s| st(s)).collect(),
            bottom: BOTTOM.into(),
            stack: v.stack.clone(),
            push: v
                .push
                .iter()
                .map(|t| PushFile { from: st(t.from), label: lt(t.letter), to: st(t.to), push: v.stack[t.symbol].clone() })
                .collect(),
            pop: v
                .pop
                .iter()
                .map(|t| PopFile {
                    from: st(t.from),
                    label: lt(t.letter),
                    pop: match t.symbol {
                        StackSymbol::Bottom => BOTTOM.into(),
                        StackSymbol::Call(g) => v.stack[g].clone(),
                    },
                    to: st(t.to),
                })
                .collect(),
            local: v
                .local
                .iter()
                .map(|t| crate::automaton::EdgeFile { from: st(t.from), label: lt(t.letter), to: st(t.to) })
                .collect(),
        }
    }
}

impl VpaFile {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("vpa file serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn resolve(&self) -> Result<Vpa> {
        let alphabet = self.alphabet.to_alphabet()?;
        let sx: HashMap<&str, StateId> = self.states.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
        let gx: HashMap<&str, usize> = self.stack.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
        let state = |s: &str| sx.get(s).copied().ok_or_else(|| Error::UnknownState(s.into()));
        let stack_sym = |s: &str| gx.get(s).copied().ok_or_else(|| input(format!("unknown stack symbol `{s}`")));
        let class_letter = |name: &str, class: LetterClass| -> Result<Letter> {
            let l = alphabet.letter(name)?;
            if alphabet.class(l) != class {
                return Err(input(format!("`{name}` is not a {class} letter")));
            }
            Ok(l)
        };
        let mut push = Vec::new();
        for t in &self.push {
            if t.push == self.bottom {
                return Err(input("push transitions may not push the bottom symbol"));
            }
            push.push(Push {
                from: state(&t.from)?,
                letter: class_letter(&t.label, LetterClass::Call)?,
                to: state(&t.to)?,
                symbol: stack_sym(&t.push)?,
            });
        }
        let mut pop = Vec::new();
        for t in &self.pop {
            let symbol = if t.pop == self.bottom { StackSymbol::Bottom } else { StackSymbol::Call(stack_sym(&t.pop)?) };
            pop.push(Pop {
                from: state(&t.from)?,
                letter: class_letter(&t.label, LetterClass::Return)?,
                symbol,
                to: state(&t.to)?,
            });
        }
        let mut local = Vec::new();
        for t in &self.local {
            local.push(Local {
                from: state(&t.from)?,
                letter: class_letter(&t.label, LetterClass::Internal)?,
                to: state(&t.to)?,
            });
        }
        Ok(Vpa {
            alphabet,
            states: self.states.clone(),
            initial: self.initial.iter().map(|s| state(s)).collect::<Result<_>>()?,
            accepting: self.accepting.iter().map(|s| state(s)).collect::<Result<_>>()?,
            stack: self.stack.clone(),
            push,
            pop,
            local,
        })
    }
}

/// Right-hand side of a grammar rule.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rhs {
    Empty,
    /// `a Y`
    Step(Letter, String),
    /// `a Y b Z`
    Nest(Letter, String, Letter, String),
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rule {
    pub lhs: String,
    pub rhs: Rhs,
}

/// A visibly pushdown grammar. Variables in `v0` derive only Dyck words.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VpGrammar {
    pub alphabet: PushdownAlphabet,
    pub v0: BTreeSet<String>,
    pub v1: BTreeSet<String>,
    pub start: String,
    pub rules: Vec<Rule>,
}

impl VpGrammar {
    pub fn new(
        alphabet: PushdownAlphabet,
        v0: BTreeSet<String>,
        v1: BTreeSet<String>,
        start: String,
        rules: Vec<Rule>,
    ) -> Result<Self> {
        let g = VpGrammar { alphabet, v0, v1, start, rules };
        g.check()?;
        Ok(g)
    }

    fn is_var(&self, x: &str) -> bool {
        self.v0.contains(x) || self.v1.contains(x)
    }

    fn check(&self) -> Result<()> {
        if let Some(x) = self.v0.intersection(&self.v1).next() {
            return Err(input(format!("variable `{x}` is in both v0 and v1")));
        }
        if !self.is_var(&self.start) {
            return Err(input(format!("start variable `{}` is not declared", self.start)));
        }
        let al = &self.alphabet;
        for r in &self.rules {
            let x = &r.lhs;
            let bad = |why: &str| Err(input(format!("rule for `{x}`: {why}")));
            if !self.is_var(x) {
                return bad("undeclared variable");
            }
            let x0 = self.v0.contains(x);
            match &r.rhs {
                Rhs::Empty => {}
                Rhs::Step(a, y) => {
                    if !self.is_var(y) {
                        return bad(&format!("undeclared variable `{y}`"));
                    }
                    if x0 && (al.class(*a) != LetterClass::Internal || !self.v0.contains(y)) {
                        return bad("a v0 variable may only step by an internal letter into v0");
                    }
                }
                Rhs::Nest(a, y, b, z) => {
                    if !self.is_var(y) || !self.is_var(z) {
                        return bad("undeclared variable");
                    }
                    if al.class(*a) != LetterClass::Call || al.class(*b) != LetterClass::Return {
                        return bad("a nesting rule needs a call then a return");
                    }
                    if !self.v0.contains(y) {
                        return bad(&format!("nested variable `{y}` must be in v0"));
                    }
                    if x0 && !self.v0.contains(z) {
                        return bad(&format!("`{z}` must be in v0"));
                    }
                }
            }
        }
        Ok(())
    }

    fn rhs_vars(rhs: &Rhs) -> Vec<&String> {
        match rhs {
            Rhs::Empty => vec![],
            Rhs::Step(_, y) => vec![y],
            Rhs::Nest(_, y, _, z) => vec![y, z],
        }
    }

    /// Variables deriving at least one terminal word.
    pub fn productive(&self) -> BTreeSet<String> {
        let mut prod = BTreeSet::new();
        loop {
            let before = prod.len();
            for r in &self.rules {
                if Self::rhs_vars(&r.rhs).iter().all(|v| prod.contains(*v)) {
                    prod.insert(r.lhs.clone());
                }
            }
            if prod.len() == before {
                return prod;
            }
        }
    }

    /// Variables deriving the empty word.
    pub fn nullable(&self) -> BTreeSet<String> {
        // only X → ε produces no letter, so the fixed point is immediate
        self.rules.iter().filter(|r| r.rhs == Rhs::Empty).map(|r| r.lhs.clone()).collect()
    }

    /// Drops unproductive variables, then variables unreachable from the
    /// start. The start variable is always kept.
    pub fn pruned(&self) -> VpGrammar {
        let prod = self.productive();
        let rules: Vec<Rule> = self
            .rules
            .iter()
            .filter(|r| prod.contains(&r.lhs) && Self::rhs_vars(&r.rhs).iter().all(|v| prod.contains(*v)))
            .cloned()
            .collect();
        let mut reach = BTreeSet::from([self.start.clone()]);
        let mut queue = VecDeque::from([self.start.clone()]);
        while let Some(x) = queue.pop_front() {
            for r in rules.iter().filter(|r| r.lhs == x) {
                for v in Self::rhs_vars(&r.rhs) {
                    if reach.insert(v.clone()) {
                        queue.push_back(v.clone());
                    }
                }
            }
        }
        let keep = |s: &BTreeSet<String>| s.iter().filter(|v| reach.contains(*v)).cloned().collect();
        VpGrammar {
            alphabet: self.alphabet.clone(),
            v0: keep(&self.v0),
            v1: keep(&self.v1),
            start: self.start.clone(),
            rules: rules.into_iter().filter(|r| reach.contains(&r.lhs)).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleFile {
    pub lhs: String,
    pub rhs: Vec<String>,
}

/// On-disk grammar. Without an explicit alphabet, letter classes are
/// inferred from the rule shapes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrammarFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alphabet: Option<AlphabetFile>,
    #[serde(default)]
    pub v0: Vec<String>,
    #[serde(default)]
    pub v1: Vec<String>,
    pub start: String,
    pub rules: Vec<RuleFile>,
}

impl GrammarFile {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    fn infer_alphabet(&self) -> Result<PushdownAlphabet> {
        let v0: BTreeSet<&str> = self.v0.iter().map(String::as_str).collect();
        let mut class: BTreeMap<String, Option<LetterClass>> = BTreeMap::new();
        let mut set = |l: &str, c: Option<LetterClass>| -> Result<()> {
            let slot = class.entry(l.to_string()).or_insert(None);
            match (*slot, c) {
                (_, None) => {}
                (None, Some(c)) => *slot = Some(c),
                (Some(old), Some(c)) if old != c => {
                    return Err(input(format!("letter `{l}` is used both as {old} and as {c}")));
                }
                _ => {}
            }
            Ok(())
        };
        for r in &self.rules {
            match r.rhs.as_slice() {
                [] => {}
                [a, _] => set(a, v0.contains(r.lhs.as_str()).then_some(LetterClass::Internal))?,
                [a, _, b, _] => {
                    set(a, Some(LetterClass::Call))?;
                    set(b, Some(LetterClass::Return))?;
                }
                _ => return Err(input(format!("rule for `{}` has a malformed right-hand side", r.lhs))),
            }
        }
        let mut groups: BTreeMap<LetterClass, Vec<String>> = BTreeMap::new();
        for (l, c) in class {
            let Some(c) = c else {
                return Err(input(format!("cannot infer the class of letter `{l}`; give an alphabet")));
            };
            groups.entry(c).or_default().push(l);
        }
        let get = |c| groups.get(&c).cloned().unwrap_or_default();
        PushdownAlphabet::new(&get(LetterClass::Call), &get(LetterClass::Return), &get(LetterClass::Internal))
    }

    pub fn grammar(&self) -> Result<VpGrammar> {
        let alphabet = match &self.alphabet {
            Some(a) => a.to_alphabet()?,
            None => self.infer_alphabet()?,
        };
        let mut rules = Vec::new();
        for r in &self.rules {
            let rhs = match r.rhs.as_slice() {
                [] => Rhs::Empty,
                [a, y] => Rhs::Step(alphabet.letter(a)?, y.clone()),
                [a, y, b, z] => Rhs::Nest(alphabet.letter(a)?, y.clone(), alphabet.letter(b)?, z.clone()),
                _ => return Err(input(format!("rule for `{}` has a malformed right-hand side", r.lhs))),
            };
            rules.push(Rule { lhs: r.lhs.clone(), rhs });
        }
        VpGrammar::new(
            alphabet,
            self.v0.iter().cloned().collect(),
            self.v1.iter().cloned().collect(),
            self.start.clone(),
            rules,
        )
    }
}

/// Dyck automaton whose admissible labels are the factors of a factorial
/// visibly pushdown language. States are the variables `X` together with
/// `(Y,$)` for unmatched calls and `(Y,(b,Z))` for nesting rules; all
/// forms of a variable share their outgoing edges.
pub fn grammar_to_automaton(g: &VpGrammar) -> Result<DyckAutomaton> {
    let g = g.pruned();
    let al = &g.alphabet;
    let prod = g.productive();
    let mut b = Builder::default();
    // forms of each variable, the variable itself first
    let mut forms: BTreeMap<String, Vec<StateId>> = BTreeMap::new();
    let vars: Vec<String> = g.v0.iter().chain(&g.v1).filter(|v| prod.contains(*v)).cloned().collect();
    for v in &vars {
        let s = b.state(v.clone());
        forms.entry(v.clone()).or_default().push(s);
    }
    let dollar = |y: &str| format!("({y},$)");
    let nested = |y: &str, bl: Letter, z: &str| format!("({y},({},{z}))", al.name(bl));
    for r in &g.rules {
        let target = match &r.rhs {
            Rhs::Step(a, y) if al.class(*a) == LetterClass::Call => Some((y.clone(), dollar(y))),
            Rhs::Nest(_, y, bl, z) => Some((y.clone(), nested(y, *bl, z))),
            _ => None,
        };
        if let Some((y, name)) = target {
            if !b.state_ix.contains_key(&name) {
                let s = b.state(name);
                forms.entry(y).or_default().push(s);
            }
        }
    }
    let mut calls_into: BTreeMap<(Letter, String), Vec<usize>> = BTreeMap::new();
    for r in &g.rules {
        for &s in &forms[&r.lhs] {
            match &r.rhs {
                Rhs::Empty => {}
                Rhs::Step(a, y) => {
                    let to = match al.class(*a) {
                        LetterClass::Call => b.state_ix[&dollar(y)],
                        _ => b.state_ix[y],
                    };
                    b.edge(s, *a, to);
                }
                Rhs::Nest(a, y, bl, z) => {
                    let e = b.edge(s, *a, b.state_ix[&nested(y, *bl, z)]);
                    calls_into.entry((*bl, z.clone())).or_default().push(e);
                }
            }
        }
    }
    let nullable = g.nullable();
    for z in g.v0.iter().filter(|z| nullable.contains(*z) && forms.contains_key(*z)) {
        for bl in al.letters_of(LetterClass::Return) {
            for t in &vars {
                let to = b.state_ix[t];
                for &s in &forms[z] {
                    let f = b.edge(s, bl, to);
                    for &e in calls_into.get(&(bl, t.clone())).into_iter().flatten() {
                        b.matched.insert((e, f));
                    }
                }
            }
        }
    }
    b.finish(al.clone())
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Sym {
    T(Letter),
    V(String),
}

/// All words of length at most `max_len` derivable from the start
/// variable (leftmost derivations, pruned by terminal count).
pub fn grammar_generate(g: &VpGrammar, max_len: usize) -> BTreeSet<Vec<Letter>> {
    let g = g.pruned();
    let mut by_lhs: HashMap<&str, Vec<&Rhs>> = HashMap::new();
    for r in &g.rules {
        by_lhs.entry(r.lhs.as_str()).or_default().push(&r.rhs);
    }
    let mut out = BTreeSet::new();
    let mut seen = BTreeSet::new();
    let start = vec![Sym::V(g.start.clone())];
    let mut queue = VecDeque::from([start.clone()]);
    seen.insert(start);
    while let Some(form) = queue.pop_front() {
        let Some(pos) = form.iter().position(|s| matches!(s, Sym::V(_))) else {
            out.insert(form.iter().map(|s| if let Sym::T(l) = s { *l } else { unreachable!() }).collect());
            continue;
        };
        let Sym::V(x) = &form[pos] else { unreachable!() };
        for rhs in by_lhs.get(x.as_str()).into_iter().flatten() {
            let repl: Vec<Sym> = match rhs {
                Rhs::Empty => vec![],
                Rhs::Step(a, y) => vec![Sym::T(*a), Sym::V(y.clone())],
                Rhs::Nest(a, y, bl, z) => vec![Sym::T(*a), Sym::V(y.clone()), Sym::T(*bl), Sym::V(z.clone())],
            };
            let mut next = form[..pos].to_vec();
            next.extend(repl);
            next.extend_from_slice(&form[pos + 1..]);
            let terminals = next.iter().filter(|s| matches!(s, Sym::T(_))).count();
            if terminals <= max_len && seen.insert(next.clone()) {
                queue.push_back(next);
            }
        }
    }
    out
}
