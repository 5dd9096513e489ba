//! Dyck automata and the word-level semantics of their admissible paths.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::words::{classify, Letter, LetterClass, PushdownAlphabet, Word};

pub type StateId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub from: StateId,
    pub letter: Letter,
    pub to: StateId,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DiagnosticKind {
    DuplicateEdge { edge: usize, first: usize },
    MatchedPairTyping { pair: usize },
    MatchedIndexOutOfRange { pair: usize },
    DuplicateMatchedPair { pair: usize },
    EdgeStateOutOfRange { edge: usize },
    EdgeLetterOutOfRange { edge: usize },
    UnknownState { edge: usize, name: String },
    UnknownLetter { edge: usize, name: String },
    DuplicateState { name: String },
    Alphabet,
    EmptyStateSet,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub kind: DiagnosticKind,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

/// A finite labeled graph over a pushdown alphabet together with the set of
/// matched (call edge, return edge) pairs.
///
/// States carry a canonical order (their index); sorted state tuples use it.
#[derive(Clone, Debug)]
pub struct DyckAutomaton {
    alphabet: PushdownAlphabet,
    states: Vec<String>,
    edges: Vec<Edge>,
    matched: BTreeSet<(usize, usize)>,
    // (state, letter) -> edge indices, in edge order
    out: HashMap<(StateId, Letter), Vec<usize>>,
    // call edge -> matched return edges
    returns_of: HashMap<usize, Vec<usize>>,
}

impl PartialEq for DyckAutomaton {
    fn eq(&self, other: &Self) -> bool {
        self.alphabet == other.alphabet
            && self.states == other.states
            && self.edges == other.edges
            && self.matched == other.matched
    }
}

impl DyckAutomaton {
    /// Builds and validates.
    pub fn new(
        alphabet: PushdownAlphabet,
        states: Vec<String>,
        edges: Vec<Edge>,
        matched: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        let a = Self::from_raw(alphabet, states, edges, matched);
        let diags = a.validate();
        if diags.is_empty() {
            Ok(a)
        } else {
            Err(Error::InvalidAutomaton(diags))
        }
    }

    /// Builds without validating. Out-of-range references are kept in the
    /// edge list (so [`validate`](Self::validate) can report them) but are
    /// left out of the lookup indexes.
    pub fn from_raw(
        alphabet: PushdownAlphabet,
        states: Vec<String>,
        edges: Vec<Edge>,
        matched: impl IntoIterator<Item = (usize, usize)>,
    ) -> Self {
        let matched: BTreeSet<_> = matched.into_iter().collect();
        let mut out: HashMap<(StateId, Letter), Vec<usize>> = HashMap::new();
        for (i, e) in edges.iter().enumerate() {
            if e.from < states.len() && e.to < states.len() && e.letter.0 < alphabet.len() {
                out.entry((e.from, e.letter)).or_default().push(i);
            }
        }
        let mut returns_of: HashMap<usize, Vec<usize>> = HashMap::new();
        for &(c, r) in &matched {
            if c < edges.len() && r < edges.len() {
                returns_of.entry(c).or_default().push(r);
            }
        }
        DyckAutomaton { alphabet, states, edges, matched, out, returns_of }
    }

    pub fn alphabet(&self) -> &PushdownAlphabet {
        &self.alphabet
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn state_id(&self, name: &str) -> Result<StateId> {
        self.states
            .iter()
            .position(|s| s == name)
            .ok_or_else(|| Error::UnknownState(name.to_string()))
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, i: usize) -> Edge {
        self.edges[i]
    }

    pub fn matched(&self) -> &BTreeSet<(usize, usize)> {
        &self.matched
    }

    pub fn is_matched(&self, call: usize, ret: usize) -> bool {
        self.matched.contains(&(call, ret))
    }

    pub fn edge_class(&self, i: usize) -> LetterClass {
        self.alphabet.class(self.edges[i].letter)
    }

    /// Edge indices leaving `p` with label `l`.
    pub fn out_edges(&self, p: StateId, l: Letter) -> &[usize] {
        self.out.get(&(p, l)).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Return edges matched with the call edge `call`.
    pub fn matched_returns(&self, call: usize) -> &[usize] {
        self.returns_of.get(&call).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn edge_index(&self, e: &Edge) -> Option<usize> {
        self.out_edges(e.from, e.letter)
            .iter()
            .copied()
            .find(|&i| self.edges[i].to == e.to)
    }

    pub fn validate(&self) -> Vec<Diagnostic> {
        let mut diags = Vec::new();
        let mut seen: HashMap<Edge, usize> = HashMap::new();
        for (i, e) in self.edges.iter().enumerate() {
            if e.from >= self.states.len() || e.to >= self.states.len() {
                diags.push(Diagnostic {
                    kind: DiagnosticKind::EdgeStateOutOfRange { edge: i },
                    message: format!("edge {i} references a state outside 0..{}", self.states.len()),
                });
            }
            if e.letter.0 >= self.alphabet.len() {
                diags.push(Diagnostic {
                    kind: DiagnosticKind::EdgeLetterOutOfRange { edge: i },
                    message: format!("edge {i} references a letter outside the alphabet"),
                });
                continue;
            }
            if let Some(&first) = seen.get(e) {
                diags.push(Diagnostic {
                    kind: DiagnosticKind::DuplicateEdge { edge: i, first },
                    message: format!("edge {i} duplicates edge {first} ({})", self.describe_edge(i)),
                });
            } else {
                seen.insert(*e, i);
            }
        }
        for (k, &(c, r)) in self.matched.iter().enumerate() {
            if c >= self.edges.len() || r >= self.edges.len() {
                diags.push(Diagnostic {
                    kind: DiagnosticKind::MatchedIndexOutOfRange { pair: k },
                    message: format!("matched pair [{c}, {r}] references a missing edge"),
                });
                continue;
            }
            let lc = self.edges[c].letter;
            let lr = self.edges[r].letter;
            if lc.0 >= self.alphabet.len() || lr.0 >= self.alphabet.len() {
                continue;
            }
            if self.alphabet.class(lc) != LetterClass::Call
                || self.alphabet.class(lr) != LetterClass::Return
            {
                diags.push(Diagnostic {
                    kind: DiagnosticKind::MatchedPairTyping { pair: k },
                    message: format!(
                        "matched pair [{c}, {r}] must pair a call edge with a return edge, found {} edge {c} and {} edge {r}",
                        self.alphabet.class(lc),
                        self.alphabet.class(lr)
                    ),
                });
            }
        }
        diags
    }

    pub fn describe_edge(&self, i: usize) -> String {
        let e = self.edges[i];
        let st = |s: StateId| self.states.get(s).map(String::as_str).unwrap_or("?");
        let lt = if e.letter.0 < self.alphabet.len() { self.alphabet.name(e.letter) } else { "?" };
        format!("({}, {}, {})", st(e.from), lt, st(e.to))
    }

    pub fn parse_word(&self, text: &str) -> Result<Word> {
        self.alphabet.parse_word(text)
    }

    /// Relation of the letter `l` given by the raw edges.
    pub fn letter_relation(&self, l: Letter) -> StateRelation {
        StateRelation::from_pairs(
            self.edges
                .iter()
                .filter(|e| e.letter == l)
                .map(|e| (e.from, e.to)),
        )
    }

    /// Pairs `(p, q)` joined by an admissible path labeled `w`.
    pub fn rel(&self, w: &[Letter]) -> StateRelation {
        let structure = classify(&self.alphabet, w);
        let partners = structure.partners(w.len());
        let mut memo = HashMap::new();
        self.rel_range(w, &partners, 0, w.len(), &mut memo)
    }

    fn rel_range(
        &self,
        w: &[Letter],
        partners: &[Option<usize>],
        lo: usize,
        hi: usize,
        memo: &mut HashMap<(usize, usize), StateRelation>,
    ) -> StateRelation {
        let mut acc = StateRelation::identity(self.num_states());
        let mut i = lo;
        while i < hi {
            let step = match partners[i] {
                Some(j) if j > i => {
                    let seg = match memo.get(&(i, j)) {
                        Some(r) => r.clone(),
                        None => {
                            let inner = self.rel_range(w, partners, i + 1, j, memo);
                            let r = self.matched_segment(w[i], w[j], &inner);
                            memo.insert((i, j), r.clone());
                            r
                        }
                    };
                    i = j + 1;
                    seg
                }
                _ => {
                    let r = self.letter_relation(w[i]);
                    i += 1;
                    r
                }
            };
            acc = acc.compose(&step);
            if acc.is_empty() {
                break;
            }
        }
        acc
    }

    fn matched_segment(&self, call: Letter, ret: Letter, inner: &StateRelation) -> StateRelation {
        let mut pairs = BTreeSet::new();
        for (ci, ce) in self.edges.iter().enumerate() {
            if ce.letter != call {
                continue;
            }
            for &ri in self.matched_returns(ci) {
                let re = self.edges[ri];
                if re.letter == ret && inner.contains(ce.to, re.from) {
                    pairs.insert((ce.from, re.to));
                }
            }
        }
        StateRelation { pairs }
    }

    pub fn is_admissible_label(&self, w: &[Letter]) -> bool {
        !self.rel(w).is_empty()
    }

    /// Bounded surrogate for block membership: is there a `u`, `v` of length
    /// exactly `depth` with `u w v` admissible?
    pub fn extendable(&self, w: &[Letter], depth: usize) -> bool {
        if !self.is_admissible_label(w) {
            return false;
        }
        let mut layer: HashSet<Vec<Letter>> = HashSet::new();
        layer.insert(w.to_vec());
        for _ in 0..depth {
            let mut next = HashSet::new();
            for word in &layer {
                for x in self.alphabet.letters() {
                    let mut left = Vec::with_capacity(word.len() + 2);
                    left.push(x);
                    left.extend_from_slice(word);
                    if !self.is_admissible_label(&left) {
                        continue;
                    }
                    for y in self.alphabet.letters() {
                        let mut both = left.clone();
                        both.push(y);
                        if !next.contains(&both) && self.is_admissible_label(&both) {
                            next.insert(both);
                        }
                    }
                }
            }
            if next.is_empty() {
                return false;
            }
            layer = next;
        }
        true
    }

    /// Restriction to the given states (kept in their current order).
    pub fn induced(&self, keep: &[StateId]) -> DyckAutomaton {
        let mut remap = vec![None; self.num_states()];
        for (new, &old) in keep.iter().enumerate() {
            remap[old] = Some(new);
        }
        let mut edge_map = vec![None; self.edges.len()];
        let mut edges = Vec::new();
        for (i, e) in self.edges.iter().enumerate() {
            if let (Some(f), Some(t)) = (remap[e.from], remap[e.to]) {
                edge_map[i] = Some(edges.len());
                edges.push(Edge { from: f, letter: e.letter, to: t });
            }
        }
        let matched = self
            .matched
            .iter()
            .filter_map(|&(c, r)| Some((edge_map[c]?, edge_map[r]?)));
        let states = keep.iter().map(|&s| self.states[s].clone()).collect();
        DyckAutomaton::from_raw(self.alphabet.clone(), states, edges, matched)
    }

    /// States lying on some cycle of the underlying graph.
    pub fn cyclic_states(&self) -> Vec<StateId> {
        let n = self.num_states();
        let mut adj = vec![Vec::new(); n];
        for e in &self.edges {
            adj[e.from].push(e.to);
        }
        let comps = strongly_connected_components(n, &adj);
        let mut keep = Vec::new();
        for comp in comps {
            let cyclic = comp.len() > 1 || adj[comp[0]].contains(&comp[0]);
            if cyclic {
                keep.extend(comp);
            }
        }
        keep.sort_unstable();
        keep
    }

    /// Restriction to [`cyclic_states`](Self::cyclic_states). Every periodic
    /// admissible path stays inside this part.
    pub fn cyclic_core(&self) -> DyckAutomaton {
        self.induced(&self.cyclic_states())
    }

    /// States through which some bi-infinite path of the graph passes.
    pub fn biinfinite_states(&self) -> Vec<StateId> {
        let n = self.num_states();
        let cyc = self.cyclic_states();
        let mut fwd = vec![Vec::new(); n];
        let mut bwd = vec![Vec::new(); n];
        for e in &self.edges {
            fwd[e.from].push(e.to);
            bwd[e.to].push(e.from);
        }
        let reach = |adj: &Vec<Vec<StateId>>| {
            let mut seen = vec![false; n];
            let mut stack = cyc.clone();
            for &s in &cyc {
                seen[s] = true;
            }
            while let Some(s) = stack.pop() {
                for &t in &adj[s] {
                    if !seen[t] {
                        seen[t] = true;
                        stack.push(t);
                    }
                }
            }
            seen
        };
        let from_cycle = reach(&fwd);
        let to_cycle = reach(&bwd);
        (0..n).filter(|&s| from_cycle[s] && to_cycle[s]).collect()
    }
}

/// Tarjan's algorithm; components come out in reverse topological order.
pub(crate) fn strongly_connected_components(n: usize, adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    struct Tarjan<'a> {
        adj: &'a [Vec<usize>],
        index: Vec<Option<usize>>,
        low: Vec<usize>,
        on_stack: Vec<bool>,
        stack: Vec<usize>,
        next: usize,
        comps: Vec<Vec<usize>>,
    }
    impl Tarjan<'_> {
        fn visit(&mut self, root: usize) {
            // iterative DFS: (node, next child position)
            let mut work = vec![(root, 0usize)];
            self.index[root] = Some(self.next);
            self.low[root] = self.next;
            self.next += 1;
            self.stack.push(root);
            self.on_stack[root] = true;
            while let Some(&mut (v, ref mut pos)) = work.last_mut() {
                if *pos < self.adj[v].len() {
                    let w = self.adj[v][*pos];
                    *pos += 1;
                    match self.index[w] {
                        None => {
                            self.index[w] = Some(self.next);
                            self.low[w] = self.next;
                            self.next += 1;
                            self.stack.push(w);
                            self.on_stack[w] = true;
                            work.push((w, 0));
                        }
                        Some(iw) if self.on_stack[w] => {
                            self.low[v] = self.low[v].min(iw);
                        }
                        _ => {}
                    }
                } else {
                    work.pop();
                    if let Some(&(parent, _)) = work.last() {
                        self.low[parent] = self.low[parent].min(self.low[v]);
                    }
                    if Some(self.low[v]) == self.index[v] {
                        let mut comp = Vec::new();
                        loop {
                            let w = self.stack.pop().unwrap();
                            self.on_stack[w] = false;
                            comp.push(w);
                            if w == v {
                                break;
                            }
                        }
                        comp.sort_unstable();
                        self.comps.push(comp);
                    }
                }
            }
        }
    }
    let mut t = Tarjan {
        adj,
        index: vec![None; n],
        low: vec![0; n],
        on_stack: vec![false; n],
        stack: Vec::new(),
        next: 0,
        comps: Vec::new(),
    };
    for v in 0..n {
        if t.index[v].is_none() {
            t.visit(v);
        }
    }
    t.comps
}

/// A binary relation on the states of an automaton.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StateRelation {
    pairs: BTreeSet<(StateId, StateId)>,
}

impl StateRelation {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn identity(n: usize) -> Self {
        Self::from_pairs((0..n).map(|p| (p, p)))
    }

    pub fn diagonal(states: impl IntoIterator<Item = StateId>) -> Self {
        Self::from_pairs(states.into_iter().map(|p| (p, p)))
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (StateId, StateId)>) -> Self {
        StateRelation { pairs: pairs.into_iter().collect() }
    }

    pub fn pairs(&self) -> &BTreeSet<(StateId, StateId)> {
        &self.pairs
    }

    pub fn iter(&self) -> impl Iterator<Item = (StateId, StateId)> + '_ {
        self.pairs.iter().copied()
    }

    pub fn contains(&self, p: StateId, q: StateId) -> bool {
        self.pairs.contains(&(p, q))
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    /// `{(p, r) : (p, q) ∈ self, (q, r) ∈ other}`.
    pub fn compose(&self, other: &StateRelation) -> StateRelation {
        let mut by_src: BTreeMap<StateId, Vec<StateId>> = BTreeMap::new();
        for &(q, r) in &other.pairs {
            by_src.entry(q).or_default().push(r);
        }
        let mut pairs = BTreeSet::new();
        for &(p, q) in &self.pairs {
            if let Some(rs) = by_src.get(&q) {
                pairs.extend(rs.iter().map(|&r| (p, r)));
            }
        }
        StateRelation { pairs }
    }

    pub fn transpose(&self) -> StateRelation {
        Self::from_pairs(self.pairs.iter().map(|&(p, q)| (q, p)))
    }

    pub fn domain(&self) -> BTreeSet<StateId> {
        self.pairs.iter().map(|&(p, _)| p).collect()
    }

    pub fn image(&self) -> BTreeSet<StateId> {
        self.pairs.iter().map(|&(_, q)| q).collect()
    }

    /// Whether the relation, read as a directed graph on `n` states, has a
    /// cycle: some power `k ≤ n` contains a diagonal pair.
    pub fn has_cycle(&self, n: usize) -> bool {
        let mut power = self.clone();
        for _ in 0..n {
            if power.pairs.iter().any(|&(p, q)| p == q) {
                return true;
            }
            if power.is_empty() {
                return false;
            }
            power = power.compose(self);
        }
        false
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlphabetFile {
    #[serde(default)]
    pub call: Vec<String>,
    #[serde(default, rename = "return")]
    pub ret: Vec<String>,
    #[serde(default)]
    pub internal: Vec<String>,
}

impl AlphabetFile {
    pub fn from_alphabet(al: &PushdownAlphabet) -> Self {
        AlphabetFile {
            call: al.names_of(LetterClass::Call),
            ret: al.names_of(LetterClass::Return),
            internal: al.names_of(LetterClass::Internal),
        }
    }

    pub fn to_alphabet(&self) -> Result<PushdownAlphabet> {
        PushdownAlphabet::new(&self.call, &self.ret, &self.internal)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeFile {
    pub from: String,
    pub label: String,
    pub to: String,
}

/// On-disk form of a [`DyckAutomaton`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AutomatonFile {
    pub alphabet: AlphabetFile,
    pub states: Vec<String>,
    pub edges: Vec<EdgeFile>,
    #[serde(default)]
    pub matched: Vec<[usize; 2]>,
}

impl AutomatonFile {
    pub fn from_automaton(a: &DyckAutomaton) -> Self {
        AutomatonFile {
            alphabet: AlphabetFile::from_alphabet(a.alphabet()),
            states: a.states().to_vec(),
            edges: a
                .edges()
                .iter()
                .map(|e| EdgeFile {
                    from: a.states()[e.from].clone(),
                    label: a.alphabet().name(e.letter).to_string(),
                    to: a.states()[e.to].clone(),
                })
                .collect(),
            matched: a.matched().iter().map(|&(c, r)| [c, r]).collect(),
        }
    }

    /// Resolves names; reports every unresolved reference and every
    /// structural violation.
    pub fn resolve(&self) -> std::result::Result<DyckAutomaton, Vec<Diagnostic>> {
        let alphabet = self.alphabet.to_alphabet().map_err(|e| {
            vec![Diagnostic { kind: DiagnosticKind::Alphabet, message: e.to_string() }]
        })?;
        let mut diags = Vec::new();
        let mut state_ix = HashMap::new();
        for (i, s) in self.states.iter().enumerate() {
            if state_ix.insert(s.as_str(), i).is_some() {
                diags.push(Diagnostic {
                    kind: DiagnosticKind::DuplicateState { name: s.clone() },
                    message: format!("state `{s}` is declared twice"),
                });
            }
        }
        let mut edges = Vec::new();
        for (i, e) in self.edges.iter().enumerate() {
            let mut lookup = |name: &str| match state_ix.get(name) {
                Some(&s) => Some(s),
                None => {
                    diags.push(Diagnostic {
                        kind: DiagnosticKind::UnknownState { edge: i, name: name.to_string() },
                        message: format!("edge {i} references unknown state `{name}`"),
                    });
                    None
                }
            };
            let from = lookup(&e.from);
            let to = lookup(&e.to);
            let letter = match alphabet.letter(&e.label) {
                Ok(l) => Some(l),
                Err(_) => {
                    diags.push(Diagnostic {
                        kind: DiagnosticKind::UnknownLetter { edge: i, name: e.label.clone() },
                        message: format!("edge {i} uses unknown letter `{}`", e.label),
                    });
                    None
                }
            };
            // keep indices aligned with the file even when an edge is broken
            edges.push(Edge {
                from: from.unwrap_or(usize::MAX),
                letter: letter.unwrap_or(Letter(usize::MAX)),
                to: to.unwrap_or(usize::MAX),
            });
        }
        let mut pairs = BTreeSet::new();
        for (k, &[c, r]) in self.matched.iter().enumerate() {
            if !pairs.insert((c, r)) {
                diags.push(Diagnostic {
                    kind: DiagnosticKind::DuplicateMatchedPair { pair: k },
                    message: format!("matched pair [{c}, {r}] is listed twice"),
                });
            }
        }
        let a = DyckAutomaton::from_raw(alphabet, self.states.clone(), edges, pairs);
        if diags.is_empty() {
            diags = a.validate();
        } else {
            // out-of-range noise from already reported names is dropped
            diags.extend(a.validate().into_iter().filter(|d| {
                !matches!(
                    d.kind,
                    DiagnosticKind::EdgeStateOutOfRange { .. } | DiagnosticKind::EdgeLetterOutOfRange { .. }
                )
            }));
        }
        if diags.is_empty() {
            Ok(a)
        } else {
            Err(diags)
        }
    }
}

impl DyckAutomaton {
    pub fn from_json(text: &str) -> Result<Self> {
        let file: AutomatonFile = serde_json::from_str(text)?;
        file.resolve().map_err(Error::InvalidAutomaton)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&AutomatonFile::from_automaton(self))
            .expect("automaton serialization cannot fail")
    }
}
