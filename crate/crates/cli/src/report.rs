use serde::Serialize;
use sofic_dyck::Error;

use crate::input::Input;

/// Why a command did not succeed; each kind has its own exit status.
#[derive(Debug)]
pub enum Failure {
    Input(String),
    Mismatch(String),
    Resource(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Input(_) => 1,
            Failure::Mismatch(_) => 2,
            Failure::Resource(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Input(m) | Failure::Mismatch(m) | Failure::Resource(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::TooLarge { .. } => Failure::Resource(e.to_string()),
            Error::Mismatch(_) => Failure::Mismatch(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct RunReport<T: Serialize> {
    pub command: Vec<String>,
    pub input: Option<Input>,
    pub results: Option<T>,
    pub error: Option<String>,
    pub status: i32,
}

/// Text lines plus the structured form of a command's results.
pub struct Output<T> {
    pub lines: Vec<String>,
    pub data: T,
    /// Set when the command ran but found a disagreement.
    pub failure: Option<Failure>,
}

impl<T> Output<T> {
    pub fn new(lines: Vec<String>, data: T) -> Self {
        Output { lines, data, failure: None }
    }
}
