use thiserror::Error;

use crate::automaton::Diagnostic;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown letter `{0}`")]
    UnknownLetter(String),

    #[error("unknown state `{0}`")]
    UnknownState(String),

    #[error("invalid alphabet: {0}")]
    InvalidAlphabet(String),

    #[error("invalid automaton ({} diagnostic(s)): {}", .0.len(), join_diagnostics(.0))]
    InvalidAutomaton(Vec<Diagnostic>),

    #[error("series order mismatch: {left} vs {right}")]
    OrderMismatch { left: usize, right: usize },

    #[error("{op} is undefined for constant term {constant}")]
    Domain { op: &'static str, constant: String },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix has no invertible constant part")]
    Singular,

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("{what} too large: {size} exceeds cap {cap}")]
    TooLarge { what: &'static str, size: u128, cap: u128 },

    #[error("cross-check mismatch: {0}")]
    Mismatch(String),

    #[error("invalid input: {0}")]
    Input(String),

    #[error("parse error: {0}")]
    Parse(#[from] serde_json::Error),
}

fn join_diagnostics(d: &[Diagnostic]) -> String {
    d.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
