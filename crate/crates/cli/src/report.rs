//! JSON fragments and the input digest.

use std::collections::BTreeSet;
use std::path::Path;

use serde_json::{json, Value};
use sha2::{Digest as _, Sha256};

use causalog_core::causality::CausalExplanation;
use causalog_core::Atom;

pub fn atom_list<'a>(atoms: impl IntoIterator<Item = &'a Atom>) -> Vec<String> {
    atoms.into_iter().map(|a| a.to_string()).collect()
}

pub fn atom_sets(sets: impl IntoIterator<Item = BTreeSet<Atom>>) -> Vec<Vec<String>> {
    sets.into_iter().map(|s| atom_list(&s)).collect()
}

pub fn explanations(causes: &[CausalExplanation]) -> Vec<Value> {
    causes
        .iter()
        .map(|e| {
            json!({
                "cause": e.cause.to_string(),
                "responsibility": e.responsibility.to_string(),
                "contingencies": atom_sets(e.contingencies.iter().cloned()),
            })
        })
        .collect()
}

/// SHA-256 over every input file, each prefixed by its path and length.
#[derive(Default)]
pub struct Digest {
    hasher: Sha256,
}

impl Digest {
    pub fn add(&mut self, path: &Path, text: &str) {
        let name = path.display().to_string();
        self.hasher.update((name.len() as u64).to_le_bytes());
        self.hasher.update(name.as_bytes());
        self.hasher.update((text.len() as u64).to_le_bytes());
        self.hasher.update(text.as_bytes());
    }

    pub fn finish(self) -> String {
        let bytes = self.hasher.finalize();
        let hex: String = bytes.iter().map(|b| format!("{b:02x}")).collect();
        format!("sha256:{hex}")
    }
}
