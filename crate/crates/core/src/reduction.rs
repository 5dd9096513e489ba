//! Left reduction (determinization by summary states), right reduction via
//! reversal, and checks of the determinism properties they guarantee.

use std::collections::{BTreeSet, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::automaton::{DyckAutomaton, Edge, StateId, StateRelation};
use crate::paths::{self, Frontier};
use crate::words::{Letter, LetterClass};

/// A state `(S, R)` of the left reduction: `S` summarises the base paths
/// since the last pending call, `R` is the set of base states reachable.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SummaryState {
    pub summary: StateRelation,
    pub subset: BTreeSet<StateId>,
}

impl SummaryState {
    pub fn initial(n: usize) -> Self {
        SummaryState { summary: StateRelation::empty(), subset: (0..n).collect() }
    }
}

/// A reduced automaton together with the distinguished state (initial for
/// the left reduction, final for the right one) and the content of each
/// synthetic state.
#[derive(Clone, Debug)]
pub struct Reduction {
    pub automaton: DyckAutomaton,
    pub distinguished: StateId,
    pub contents: Vec<SummaryState>,
}

/// Sidecar entry describing a synthetic state `S{k}` by base state names.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SidecarEntry {
    pub name: String,
    pub summary: Vec<[String; 2]>,
    pub subset: Vec<String>,
}

impl Reduction {
    pub fn sidecar(&self, base: &DyckAutomaton) -> Vec<SidecarEntry> {
        let bn = |s: StateId| base.states()[s].clone();
        self.contents
            .iter()
            .enumerate()
            .map(|(k, c)| SidecarEntry {
                name: self.automaton.states()[k].clone(),
                summary: c.summary.iter().map(|(p, q)| [bn(p), bn(q)]).collect(),
                subset: c.subset.iter().map(|&s| bn(s)).collect(),
            })
            .collect()
    }
}

fn image(rel: &[Vec<StateId>], set: &BTreeSet<StateId>) -> BTreeSet<StateId> {
    set.iter().flat_map(|&p| rel[p].iter().copied()).collect()
}

struct Builder<'a> {
    base: &'a DyckAutomaton,
    // successor lists per letter: succ[l][p]
    succ: Vec<Vec<Vec<StateId>>>,
    letter_rel: Vec<StateRelation>,
    states: Vec<SummaryState>,
    index: HashMap<SummaryState, StateId>,
    edges: Vec<Edge>,
    edge_index: HashMap<Edge, usize>,
    matched: BTreeSet<(usize, usize)>,
    pending: VecDeque<StateId>,
}

impl<'a> Builder<'a> {
    fn new(base: &'a DyckAutomaton) -> Self {
        let n = base.num_states();
        let nl = base.alphabet().len();
        let mut succ = vec![vec![Vec::new(); n]; nl];
        for e in base.edges() {
            succ[e.letter.0][e.from].push(e.to);
        }
        let letter_rel = base.alphabet().letters().map(|l| base.letter_relation(l)).collect();
        Builder {
            base,
            succ,
            letter_rel,
            states: Vec::new(),
            index: HashMap::new(),
            edges: Vec::new(),
            edge_index: HashMap::new(),
            matched: BTreeSet::new(),
            pending: VecDeque::new(),
        }
    }

    fn state(&mut self, s: SummaryState) -> StateId {
        if let Some(&id) = self.index.get(&s) {
            return id;
        }
        let id = self.states.len();
        self.states.push(s.clone());
        self.index.insert(s, id);
        self.pending.push_back(id);
        id
    }

    fn edge(&mut self, from: StateId, letter: Letter, to: StateId) -> usize {
        let e = Edge { from, letter, to };
        if let Some(&i) = self.edge_index.get(&e) {
            return i;
        }
        let i = self.edges.len();
        self.edges.push(e);
        self.edge_index.insert(e, i);
        i
    }

    /// Internal, call and unmatched-return edges of every new state.
    fn expand(&mut self) {
        while let Some(id) = self.pending.pop_front() {
            let cur = self.states[id].clone();
            for l in self.base.alphabet().letters() {
                let r2 = image(&self.succ[l.0], &cur.subset);
                if r2.is_empty() {
                    continue;
                }
                let target = match self.base.alphabet().class(l) {
                    LetterClass::Internal => SummaryState {
                        summary: cur.summary.compose(&self.letter_rel[l.0]),
                        subset: r2,
                    },
                    LetterClass::Call => SummaryState {
                        summary: StateRelation::diagonal(r2.iter().copied()),
                        subset: r2,
                    },
                    LetterClass::Return => {
                        if !cur.summary.is_empty() {
                            continue;
                        }
                        SummaryState { summary: StateRelation::empty(), subset: r2 }
                    }
                };
                let t = self.state(target);
                self.edge(id, l, t);
            }
        }
    }

    fn update(&self, call: Letter, inner: &StateRelation, ret: Letter) -> StateRelation {
        let mut pairs = BTreeSet::new();
        for (ci, ce) in self.base.edges().iter().enumerate() {
            if ce.letter != call {
                continue;
            }
            for &ri in self.base.matched_returns(ci) {
                let re = self.base.edge(ri);
                if re.letter == ret && inner.contains(ce.to, re.from) {
                    pairs.insert((ce.from, re.to));
                }
            }
        }
        StateRelation::from_pairs(pairs)
    }

    /// States reachable from the target of `call` by Dyck-labeled paths
    /// built from the edges found so far.
    fn dyck_closure(&self, call: usize, returns_of: &HashMap<usize, Vec<usize>>) -> BTreeSet<StateId> {
        let al = self.base.alphabet();
        let mut seen = BTreeSet::new();
        let mut stack = vec![self.edges[call].to];
        while let Some(x) = stack.pop() {
            if !seen.insert(x) {
                continue;
            }
            for (i, e) in self.edges.iter().enumerate() {
                if e.from != x {
                    continue;
                }
                match al.class(e.letter) {
                    LetterClass::Internal => stack.push(e.to),
                    LetterClass::Call => {
                        for &r in returns_of.get(&i).map(Vec::as_slice).unwrap_or(&[]) {
                            stack.push(self.edges[r].to);
                        }
                    }
                    LetterClass::Return => {}
                }
            }
        }
        seen
    }

    fn run(mut self) -> (Vec<SummaryState>, Vec<Edge>, BTreeSet<(usize, usize)>) {
        let n = self.base.num_states();
        if n == 0 {
            return (Vec::new(), Vec::new(), BTreeSet::new());
        }
        self.state(SummaryState::initial(n));
        let returns: Vec<Letter> = self.base.alphabet().letters_of(LetterClass::Return);
        loop {
            self.expand();
            let mut returns_of: HashMap<usize, Vec<usize>> = HashMap::new();
            for &(c, r) in &self.matched {
                returns_of.entry(c).or_default().push(r);
            }
            let calls: Vec<usize> = (0..self.edges.len())
                .filter(|&i| self.base.alphabet().class(self.edges[i].letter) == LetterClass::Call)
                .collect();
            let mut changed = false;
            for c in calls {
                let src = self.states[self.edges[c].from].clone();
                let a = self.edges[c].letter;
                for x in self.dyck_closure(c, &returns_of) {
                    let inner = self.states[x].summary.clone();
                    for &b in &returns {
                        let upd = self.update(a, &inner, b);
                        let subset: BTreeSet<StateId> = image_of_relation(&upd, &src.subset);
                        if subset.is_empty() {
                            continue;
                        }
                        let target = SummaryState { summary: src.summary.compose(&upd), subset };
                        let t = self.state(target);
                        let r = self.edge(x, b, t);
                        changed |= self.matched.insert((c, r));
                    }
                }
            }
            if !changed && self.pending.is_empty() {
                break;
            }
        }
        (self.states, self.edges, self.matched)
    }
}

fn image_of_relation(rel: &StateRelation, set: &BTreeSet<StateId>) -> BTreeSet<StateId> {
    rel.iter().filter(|(p, _)| set.contains(p)).map(|(_, q)| q).collect()
}

/// The left reduction restricted to states reachable from `I = (∅, Q)` by
/// admissible paths. State `S0` is `I`.
pub fn left_reduce(a: &DyckAutomaton) -> Reduction {
    let (contents, edges, matched) = Builder::new(a).run();
    let names = (0..contents.len()).map(|k| format!("S{k}")).collect();
    let automaton = DyckAutomaton::from_raw(a.alphabet().clone(), names, edges, matched);
    debug_assert!(automaton.validate().is_empty());
    Reduction { automaton, distinguished: 0, contents }
}

/// Reverses every edge and exchanges calls with returns; the matched pair
/// `(e, f)` becomes `(rev f, rev e)`.
pub fn reverse(a: &DyckAutomaton) -> DyckAutomaton {
    let edges = a
        .edges()
        .iter()
        .map(|e| Edge { from: e.to, letter: e.letter, to: e.from })
        .collect();
    let matched = a.matched().iter().map(|&(c, r)| (r, c));
    DyckAutomaton::from_raw(a.alphabet().mirrored(), a.states().to_vec(), edges, matched)
}

/// `reverse(left_reduce(reverse(a)))`; the distinguished state is final.
pub fn right_reduce(a: &DyckAutomaton) -> Reduction {
    let left = left_reduce(&reverse(a));
    Reduction {
        automaton: reverse(&left.automaton),
        distinguished: left.distinguished,
        contents: left.contents,
    }
}

/// At most one admissible path from `initial` for each label of length
/// `≤ max_len`.
pub fn check_weak_determinism(a: &DyckAutomaton, initial: StateId, max_len: usize) -> bool {
    let mut ok = true;
    paths::for_each_label(a, paths::start_at([initial]), max_len, &mut |_, f| {
        ok = paths::path_count(f) <= 1;
        ok
    });
    ok
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum DeterminismClass {
    Call,
    Internal,
    /// No state has two incoming return edges with the same letter.
    ReturnCo,
}

pub fn check_class_determinism(a: &DyckAutomaton, class: DeterminismClass) -> bool {
    let al = a.alphabet();
    let mut seen = BTreeSet::new();
    for e in a.edges() {
        let c = al.class(e.letter);
        let key = match class {
            DeterminismClass::Call if c == LetterClass::Call => (e.from, e.letter),
            DeterminismClass::Internal if c == LetterClass::Internal => (e.from, e.letter),
            DeterminismClass::ReturnCo if c == LetterClass::Return => (e.to, e.letter),
            _ => continue,
        };
        if !seen.insert(key) {
            return false;
        }
    }
    true
}

/// For every state and every Dyck word of length `≤ max_len`, at most one
/// admissible path starts there with that label. Returns the first
/// offending `(state, word)`.
pub fn dyck_determinism_violation(a: &DyckAutomaton, max_len: usize) -> Option<(StateId, Vec<Letter>)> {
    let al = a.alphabet().clone();
    for s in 0..a.num_states() {
        let mut bad = None;
        paths::for_each_label(a, paths::start_at([s]), max_len, &mut |w, f: &Frontier| {
            if paths::path_count(f) > 1 && crate::words::is_dyck(&al, w) {
                bad = Some(w.to_vec());
                return false;
            }
            true
        });
        if let Some(w) = bad {
            return Some((s, w));
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::words::PushdownAlphabet;

    fn single_loop() -> DyckAutomaton {
        let al = PushdownAlphabet::new::<&str>(&[], &[], &["i"]).unwrap();
        let i = al.letter("i").unwrap();
        DyckAutomaton::new(al, vec!["q".into()], vec![Edge { from: 0, letter: i, to: 0 }], []).unwrap()
    }

    #[test]
    fn single_loop_reduces_to_itself() {
        let r = left_reduce(&single_loop());
        assert_eq!(r.automaton.num_states(), 1);
        assert_eq!(r.automaton.edges().len(), 1);
        assert_eq!(r.contents[0], SummaryState::initial(1));
        let rr = right_reduce(&single_loop());
        assert_eq!(rr.automaton.num_states(), 1);
        assert!(check_weak_determinism(&single_loop(), 0, 6));
    }

    #[test]
    fn reverse_is_an_involution() {
        for (name, a) in fixtures::all() {
            assert_eq!(reverse(&reverse(&a)), a, "{name}");
        }
    }

    #[test]
    fn lr_reduction_states() {
        let r = left_reduce(&fixtures::lr());
        // the verbatim rules also produce (∅, {2, 3}) after "b" from I
        assert_eq!(r.automaton.num_states(), 8);
    }

    #[test]
    fn nd_is_not_weakly_deterministic() {
        assert!(!check_weak_determinism(&fixtures::nd(), 0, 4));
        let r = left_reduce(&fixtures::nd());
        assert!(check_weak_determinism(&r.automaton, r.distinguished, 8));
        assert!(check_class_determinism(&r.automaton, DeterminismClass::Call));
        assert!(check_class_determinism(&r.automaton, DeterminismClass::Internal));
    }

    #[test]
    fn ex1_is_call_deterministic() {
        assert!(check_class_determinism(&fixtures::ex1(), DeterminismClass::Call));
    }

    #[test]
    fn right_reduction_is_return_codeterministic() {
        let r = right_reduce(&fixtures::nd());
        assert!(check_class_determinism(&r.automaton, DeterminismClass::ReturnCo));
    }

    #[test]
    fn two_call_edges_break_call_determinism() {
        let al = PushdownAlphabet::new(&["a"], &["b"], &[] as &[&str]).unwrap();
        let a = al.letter("a").unwrap();
        let m = DyckAutomaton::new(
            al,
            vec!["1".into(), "2".into()],
            vec![Edge { from: 0, letter: a, to: 0 }, Edge { from: 0, letter: a, to: 1 }],
            [],
        )
        .unwrap();
        assert!(!check_class_determinism(&m, DeterminismClass::Call));
    }
}
