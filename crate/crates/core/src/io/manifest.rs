//! Run manifests: config hash, versions, wall time and results.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::path::Path;

/// SHA-256 of the canonical JSON form of `config`, hex encoded.
pub fn config_hash<T: Serialize>(config: &T) -> Result<String> {
    let canonical = serde_json::to_vec(config).map_err(|e| Error::Format(e.to_string()))?;
    Ok(Sha256::digest(&canonical).iter().map(|b| format!("{b:02x}")).collect())
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct RunEntry {
    pub id: String,
    pub system: String,
    pub epsilon: f64,
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<serde_json::Value>,
    pub files: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct Manifest {
    pub schema_version: u32,
    pub name: String,
    pub config_hash: String,
    pub versions: BTreeMap<String, String>,
    pub wall_time_seconds: f64,
    pub runs: Vec<RunEntry>,
    /// Fitted log-log slope of the final error against `ε`, per system.
    pub slopes: BTreeMap<String, f64>,
    pub files: Vec<String>,
}

pub fn versions() -> BTreeMap<String, String> {
    BTreeMap::from([
        ("nfkgw-core".to_string(), env!("CARGO_PKG_VERSION").to_string()),
        ("nfld".to_string(), super::nfld::VERSION.to_string()),
    ])
}

impl Manifest {
    pub fn save(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self).map_err(|e| Error::Format(e.to_string()))?;
        std::fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
    }
}
