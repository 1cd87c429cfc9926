//! Run manifests: the integrity record left in every run directory.
//!
//! The manifest names the tool version, the experiment kind, a hash of the
//! canonical config, start/finish timestamps, run status, any warnings the
//! run produced, and a SHA-256 checksum for every file the run emitted
//! (including the resolved config copy, excluding the manifest itself).
//! `sgdlab report` re-verifies a directory against this record.

use std::collections::BTreeMap;
use std::path::Path;

use chrono::{SecondsFormat, Utc};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::ExperimentKind;
use crate::CliError;

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Ok,
    Failed,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub kind: ExperimentKind,
    pub seed: u64,
    /// SHA-256 of the canonical (format-independent) config serialization.
    pub config_hash: String,
    pub started: String,
    pub finished: String,
    pub status: RunStatus,
    /// Present exactly when `status` is `failed`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub warnings: Vec<String>,
    /// File name → SHA-256, sorted by name. Every file the run emitted is
    /// listed; a partial (failed) run still checksums what it wrote.
    pub outputs: BTreeMap<String, String>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    format!("{:x}", hasher.finalize())
}

pub fn sha256_file(path: &Path) -> std::io::Result<String> {
    Ok(sha256_hex(&std::fs::read(path)?))
}

pub fn now_rfc3339() -> String {
    Utc::now().to_rfc3339_opts(SecondsFormat::Millis, true)
}

impl RunManifest {
    /// Checksums every regular file in `dir` except the manifest itself.
    pub fn collect_outputs(dir: &Path) -> std::io::Result<BTreeMap<String, String>> {
        let mut outputs = BTreeMap::new();
        for entry in std::fs::read_dir(dir)? {
            let entry = entry?;
            if !entry.file_type()?.is_file() {
                continue;
            }
            let name = entry.file_name().to_string_lossy().into_owned();
            if name == MANIFEST_FILE {
                continue;
            }
            outputs.insert(name, sha256_file(&entry.path())?);
        }
        Ok(outputs)
    }

    pub fn write(&self, dir: &Path) -> std::io::Result<()> {
        let mut text = serde_json::to_string_pretty(self).expect("manifest serializes");
        text.push('\n');
        std::fs::write(dir.join(MANIFEST_FILE), text)
    }

    pub fn load(dir: &Path) -> Result<Self, CliError> {
        let path = dir.join(MANIFEST_FILE);
        let text = std::fs::read_to_string(&path).map_err(|e| {
            CliError::Validation(vec![format!("manifest: cannot read {}: {e}", path.display())])
        })?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Validation(vec![format!("manifest: {e}")]))
    }

    /// Re-verifies the directory: every listed file must exist with a
    /// matching checksum, and no unlisted files may have appeared. Returns
    /// the problems found (empty means the directory is intact).
    pub fn verify(&self, dir: &Path) -> std::io::Result<Vec<String>> {
        let mut problems = Vec::new();
        let actual = Self::collect_outputs(dir)?;
        for (name, expected) in &self.outputs {
            match actual.get(name) {
                None => problems.push(format!("{name}: listed in the manifest but missing")),
                Some(got) if got != expected => {
                    problems.push(format!("{name}: checksum mismatch"))
                }
                Some(_) => {}
            }
        }
        for name in actual.keys() {
            if !self.outputs.contains_key(name) {
                problems.push(format!("{name}: present but not listed in the manifest"));
            }
        }
        Ok(problems)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sha256_matches_known_vector() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn verify_flags_missing_changed_and_extra_files() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("a.csv"), "x\r\n1\r\n").unwrap();
        std::fs::write(dir.path().join("gone.csv"), "y\r\n2\r\n").unwrap();
        let manifest = RunManifest {
            tool_version: "0".into(),
            kind: ExperimentKind::AppendixH,
            seed: 1,
            config_hash: String::new(),
            started: now_rfc3339(),
            finished: now_rfc3339(),
            status: RunStatus::Ok,
            error: None,
            warnings: Vec::new(),
            outputs: RunManifest::collect_outputs(dir.path()).unwrap(),
        };
        assert!(manifest.verify(dir.path()).unwrap().is_empty());

        std::fs::write(dir.path().join("a.csv"), "x\r\n9\r\n").unwrap();
        std::fs::remove_file(dir.path().join("gone.csv")).unwrap();
        std::fs::write(dir.path().join("extra.csv"), "z\r\n").unwrap();
        let problems = manifest.verify(dir.path()).unwrap();
        let text = problems.join("\n");
        assert!(text.contains("a.csv: checksum mismatch"), "{text}");
        assert!(text.contains("gone.csv: listed in the manifest but missing"), "{text}");
        assert!(text.contains("extra.csv: present but not listed"), "{text}");
    }

    #[test]
    fn manifest_round_trips_through_json() {
        let dir = tempfile::tempdir().unwrap();
        let manifest = RunManifest {
            tool_version: env!("CARGO_PKG_VERSION").into(),
            kind: ExperimentKind::EscapeTime,
            seed: 42,
            config_hash: sha256_hex(b"{}"),
            started: now_rfc3339(),
            finished: now_rfc3339(),
            status: RunStatus::Failed,
            error: Some("boom".into()),
            warnings: vec!["censored paths".into()],
            outputs: BTreeMap::new(),
        };
        manifest.write(dir.path()).unwrap();
        let back = RunManifest::load(dir.path()).unwrap();
        assert_eq!(back.status, RunStatus::Failed);
        assert_eq!(back.error.as_deref(), Some("boom"));
        assert_eq!(back.kind, ExperimentKind::EscapeTime);
    }
}
