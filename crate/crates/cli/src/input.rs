use std::fs;

use serde::Serialize;
use sha2::{Digest, Sha256};
use sofic_dyck::fixtures;

use crate::report::Failure;

/// Raw input text with where it came from and its digest.
#[derive(Clone, Debug, Serialize)]
pub struct Input {
    pub name: String,
    pub sha256: String,
    #[serde(skip)]
    pub text: String,
}

fn embedded(name: &str) -> Option<&'static str> {
    let key = name.to_ascii_lowercase();
    let key = key.strip_prefix("fix-").unwrap_or(&key);
    Some(match key {
        "ex1" => fixtures::EX1_JSON,
        "d2" => fixtures::D2_JSON,
        "motz" | "motzkin" => fixtures::MOTZKIN_JSON,
        "nd" => fixtures::ND_JSON,
        "lr" => fixtures::LR_JSON,
        "sample-grammar" => fixtures::SAMPLE_GRAMMAR_JSON,
        _ => return None,
    })
}

/// Reads a file, or an embedded fixture given as `@fix-ex1`,
/// `@sample-grammar`, ...
pub fn read(spec: &str) -> Result<Input, Failure> {
    let text = match spec.strip_prefix('@') {
        Some(name) => embedded(name)
            .ok_or_else(|| Failure::Input(format!("unknown fixture `{spec}`")))?
            .to_string(),
        None => fs::read_to_string(spec).map_err(|e| Failure::Input(format!("cannot read {spec}: {e}")))?,
    };
    let sha256 = hex::encode(Sha256::digest(text.as_bytes()));
    Ok(Input { name: spec.to_string(), sha256, text })
}

pub fn write(path: &str, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::Input(format!("cannot write {path}: {e}")))
}
