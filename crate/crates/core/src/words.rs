//! Pushdown alphabets, words, and the visible matching of calls and returns.

use std::collections::HashMap;
use std::fmt;
use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Index of a letter inside its [`PushdownAlphabet`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LetterClass {
    Call,
    Return,
    Internal,
}

impl LetterClass {
    /// Calls and returns trade places; internal letters stay put.
    pub fn mirrored(self) -> Self {
        match self {
            LetterClass::Call => LetterClass::Return,
            LetterClass::Return => LetterClass::Call,
            LetterClass::Internal => LetterClass::Internal,
        }
    }
}

impl fmt::Display for LetterClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LetterClass::Call => "call",
            LetterClass::Return => "return",
            LetterClass::Internal => "internal",
        })
    }
}

/// An alphabet split into call, return and internal letters.
///
/// Letters are arbitrary non-empty tokens without whitespace. Indices are
/// assigned in declaration order: calls first, then returns, then internal
/// letters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PushdownAlphabet {
    names: Vec<String>,
    classes: Vec<LetterClass>,
    index: HashMap<String, Letter>,
}

impl PushdownAlphabet {
    pub fn new<S: AsRef<str>>(call: &[S], ret: &[S], internal: &[S]) -> Result<Self> {
        let mut names = Vec::new();
        let mut classes = Vec::new();
        for (group, class) in [
            (call, LetterClass::Call),
            (ret, LetterClass::Return),
            (internal, LetterClass::Internal),
        ] {
            for name in group {
                names.push(name.as_ref().to_string());
                classes.push(class);
            }
        }
        Self::from_parts(names, classes)
    }

    pub(crate) fn from_parts(names: Vec<String>, classes: Vec<LetterClass>) -> Result<Self> {
        if names.is_empty() {
            return Err(Error::InvalidAlphabet("alphabet is empty".into()));
        }
        let mut index = HashMap::new();
        for (i, name) in names.iter().enumerate() {
            if name.is_empty() || name.chars().any(char::is_whitespace) {
                return Err(Error::InvalidAlphabet(format!("bad letter token {name:?}")));
            }
            if index.insert(name.clone(), Letter(i)).is_some() {
                return Err(Error::InvalidAlphabet(format!(
                    "letter `{name}` appears in more than one class"
                )));
            }
        }
        Ok(PushdownAlphabet { names, classes, index })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn class(&self, l: Letter) -> LetterClass {
        self.classes[l.0]
    }

    pub fn name(&self, l: Letter) -> &str {
        &self.names[l.0]
    }

    pub fn letter(&self, name: &str) -> Result<Letter> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownLetter(name.to_string()))
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> + '_ {
        (0..self.names.len()).map(Letter)
    }

    pub fn letters_of(&self, class: LetterClass) -> Vec<Letter> {
        self.letters().filter(|&l| self.class(l) == class).collect()
    }

    pub fn names_of(&self, class: LetterClass) -> Vec<String> {
        self.letters_of(class)
            .into_iter()
            .map(|l| self.name(l).to_string())
            .collect()
    }

    /// Same letters with calls and returns exchanged.
    pub fn mirrored(&self) -> Self {
        PushdownAlphabet {
            names: self.names.clone(),
            classes: self.classes.iter().map(|c| c.mirrored()).collect(),
            index: self.index.clone(),
        }
    }

    /// Parses a whitespace-separated sequence of letter tokens.
    pub fn parse_word(&self, text: &str) -> Result<Word> {
        text.split_whitespace()
            .map(|tok| self.letter(tok))
            .collect::<Result<Vec<_>>>()
            .map(Word)
    }

    pub fn render(&self, w: &[Letter]) -> String {
        w.iter().map(|&l| self.name(l)).collect::<Vec<_>>().join(" ")
    }

    fn height_step(&self, l: Letter) -> i64 {
        match self.class(l) {
            LetterClass::Call => 1,
            LetterClass::Return => -1,
            LetterClass::Internal => 0,
        }
    }
}

/// A finite word, stored as letter indices of some alphabet.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn reversed(&self) -> Word {
        Word(self.0.iter().rev().copied().collect())
    }

    pub fn concat(&self, other: &[Letter]) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(other);
        Word(v)
    }
}

impl Deref for Word {
    type Target = [Letter];
    fn deref(&self) -> &[Letter] {
        &self.0
    }
}

impl From<Vec<Letter>> for Word {
    fn from(v: Vec<Letter>) -> Self {
        Word(v)
    }
}

impl FromIterator<Letter> for Word {
    fn from_iter<I: IntoIterator<Item = Letter>>(iter: I) -> Self {
        Word(iter.into_iter().collect())
    }
}

/// The visible matching of a word.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MatchStructure {
    /// `(call position, return position)`, sorted by call position.
    pub matched_pairs: Vec<(usize, usize)>,
    pub unmatched_returns: Vec<usize>,
    pub unmatched_calls: Vec<usize>,
}

impl MatchStructure {
    /// For every position, the index of its partner if it is visibly matched.
    pub fn partners(&self, len: usize) -> Vec<Option<usize>> {
        let mut p = vec![None; len];
        for &(i, j) in &self.matched_pairs {
            p[i] = Some(j);
            p[j] = Some(i);
        }
        p
    }
}

/// Number of call letters minus number of return letters.
pub fn balance(alphabet: &PushdownAlphabet, w: &[Letter]) -> i64 {
    w.iter().map(|&l| alphabet.height_step(l)).sum()
}

/// Single left-to-right scan; a return pops the innermost open call, or is
/// unmatched when no call is open.
pub fn classify(alphabet: &PushdownAlphabet, w: &[Letter]) -> MatchStructure {
    let mut open = Vec::new();
    let mut s = MatchStructure::default();
    for (pos, &l) in w.iter().enumerate() {
        match alphabet.class(l) {
            LetterClass::Call => open.push(pos),
            LetterClass::Return => match open.pop() {
                Some(c) => s.matched_pairs.push((c, pos)),
                None => s.unmatched_returns.push(pos),
            },
            LetterClass::Internal => {}
        }
    }
    s.unmatched_calls = open;
    s.matched_pairs.sort_unstable();
    s
}

pub fn is_matched_return(alphabet: &PushdownAlphabet, w: &[Letter]) -> bool {
    let mut h = 0i64;
    for &l in w {
        match alphabet.class(l) {
            LetterClass::Call => h += 1,
            LetterClass::Return if h == 0 => return false,
            LetterClass::Return => h -= 1,
            LetterClass::Internal => {}
        }
    }
    true
}

pub fn is_matched_call(alphabet: &PushdownAlphabet, w: &[Letter]) -> bool {
    let mut h = 0i64;
    for &l in w.iter().rev() {
        match alphabet.class(l) {
            LetterClass::Return => h += 1,
            LetterClass::Call if h == 0 => return false,
            LetterClass::Call => h -= 1,
            LetterClass::Internal => {}
        }
    }
    true
}

pub fn is_dyck(alphabet: &PushdownAlphabet, w: &[Letter]) -> bool {
    is_matched_return(alphabet, w) && balance(alphabet, w) == 0
}

/// Splits a Dyck word into its prime Dyck factors.
pub fn prime_factorize(alphabet: &PushdownAlphabet, w: &[Letter]) -> Result<Vec<Word>> {
    if !is_dyck(alphabet, w) {
        return Err(Error::Precondition(format!(
            "`{}` is not a Dyck word",
            alphabet.render(w)
        )));
    }
    let mut out = Vec::new();
    let mut start = 0;
    let mut h = 0i64;
    for (pos, &l) in w.iter().enumerate() {
        h += alphabet.height_step(l);
        if h == 0 {
            out.push(Word(w[start..=pos].to_vec()));
            start = pos + 1;
        }
    }
    Ok(out)
}

/// All cyclic rotations; rotation `k` moves the first `k` letters to the end.
/// The empty word has the single rotation `ε`.
pub fn conjugates(w: &[Letter]) -> Vec<Word> {
    if w.is_empty() {
        return vec![Word::empty()];
    }
    (0..w.len())
        .map(|k| w[k..].iter().chain(&w[..k]).copied().collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn abi() -> PushdownAlphabet {
        PushdownAlphabet::new(&["a", "a'"], &["b", "b'"], &["i"]).unwrap()
    }

    fn motzkin() -> PushdownAlphabet {
        PushdownAlphabet::new(&["(", "["], &[")", "]"], &["i"]).unwrap()
    }

    #[test]
    fn balance_counts() {
        let al = abi();
        assert_eq!(balance(&al, &al.parse_word("a a b").unwrap()), 1);
        assert_eq!(balance(&al, &al.parse_word("").unwrap()), 0);
        assert_eq!(balance(&al, &al.parse_word("i i i").unwrap()), 0);
    }

    #[test]
    fn unknown_letter_is_rejected() {
        assert!(matches!(
            abi().parse_word("a z"),
            Err(Error::UnknownLetter(t)) if t == "z"
        ));
    }

    #[test]
    fn classify_examples() {
        let al = abi();
        let s = classify(&al, &al.parse_word("b a").unwrap());
        assert_eq!(s.unmatched_returns, vec![0]);
        assert_eq!(s.unmatched_calls, vec![1]);
        assert!(s.matched_pairs.is_empty());

        let s = classify(&al, &al.parse_word("a i b").unwrap());
        assert_eq!(s.matched_pairs, vec![(0, 2)]);

        let s = classify(&al, &al.parse_word("a a b").unwrap());
        assert_eq!(s.matched_pairs, vec![(1, 2)]);
        assert_eq!(s.unmatched_calls, vec![0]);
    }

    #[test]
    fn dyck_predicates() {
        let m = motzkin();
        assert!(is_dyck(&m, &m.parse_word("( [ i i ] [ ] )").unwrap()));
        let al = abi();
        let w = al.parse_word("a a b").unwrap();
        assert!(is_matched_return(&al, &w));
        assert!(!is_matched_call(&al, &w));
        assert!(!is_dyck(&al, &w));
        let e = Word::empty();
        assert!(is_dyck(&al, &e) && is_matched_call(&al, &e) && is_matched_return(&al, &e));
    }

    #[test]
    fn prime_factorizations() {
        let al = abi();
        let f = prime_factorize(&al, &al.parse_word("a b a' b'").unwrap()).unwrap();
        let r: Vec<_> = f.iter().map(|w| al.render(w)).collect();
        assert_eq!(r, vec!["a b", "a' b'"]);
        let f = prime_factorize(&al, &al.parse_word("a a b b").unwrap()).unwrap();
        assert_eq!(f.len(), 1);
        assert!(prime_factorize(&al, &[]).unwrap().is_empty());
        assert!(prime_factorize(&al, &al.parse_word("a").unwrap()).is_err());
    }

    #[test]
    fn conjugate_examples() {
        let al = abi();
        let c: Vec<_> = conjugates(&al.parse_word("a b i").unwrap())
            .iter()
            .map(|w| al.render(w))
            .collect();
        assert_eq!(c, vec!["a b i", "b i a", "i a b"]);
        let mut c = conjugates(&al.parse_word("a a").unwrap());
        c.dedup();
        assert_eq!(c.len(), 1);
        assert_eq!(conjugates(&[]), vec![Word::empty()]);
    }

    #[test]
    fn alphabet_rejects_overlap() {
        assert!(PushdownAlphabet::new(&["a"], &["a"], &[]).is_err());
        assert!(PushdownAlphabet::new::<&str>(&[], &[], &[]).is_err());
    }
}
