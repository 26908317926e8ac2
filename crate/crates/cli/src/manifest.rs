use std::collections::BTreeMap;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use sha2::{Digest, Sha256};

/// Provenance block embedded in every output document.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: Vec<String>,
    pub version: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scenario: Option<ScenarioTag>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<String>,
    pub seeds: Vec<u64>,
    pub jobs: usize,
    pub tolerances: BTreeMap<String, f64>,
    pub started_unix: f64,
    pub finished_unix: f64,
    /// SHA-256 of every input read and every artifact written.
    pub artifacts: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ScenarioTag {
    pub n: usize,
    pub m: usize,
}

pub fn now() -> f64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0)
}

pub fn sha256(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

impl RunManifest {
    pub fn new(command: Vec<String>, seed: u64, jobs: usize) -> Self {
        RunManifest {
            command,
            version: env!("CARGO_PKG_VERSION"),
            scenario: None,
            model: None,
            seeds: vec![seed],
            jobs,
            tolerances: BTreeMap::new(),
            started_unix: now(),
            finished_unix: 0.0,
            artifacts: BTreeMap::new(),
        }
    }

    pub fn tolerance(&mut self, name: &str, v: f64) {
        self.tolerances.insert(name.to_string(), v);
    }

    pub fn artifact(&mut self, name: impl Into<String>, bytes: &[u8]) {
        self.artifacts.insert(name.into(), sha256(bytes));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_digest() {
        assert_eq!(sha256(b"abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }
}
