//! Run manifests: every command writes one `manifest.json` next to its
//! outputs with the command line, config snapshot, resolved seed, input and
//! output paths, tool version, and wall-clock duration. An output is
//! reconstructible from its manifest alone.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub tool_version: String,
    pub seed: u64,
    pub config: serde_json::Value,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub duration_seconds: f64,
}

/// Builder that captures the start time on construction.
pub struct ManifestTimer {
    command: String,
    started: Instant,
}

impl ManifestTimer {
    pub fn start(command: impl Into<String>) -> Self {
        Self { command: command.into(), started: Instant::now() }
    }

    pub fn finish(
        self,
        seed: u64,
        config: serde_json::Value,
        inputs: Vec<PathBuf>,
        outputs: Vec<PathBuf>,
    ) -> RunManifest {
        RunManifest {
            command: self.command,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
            config,
            inputs: inputs.iter().map(|p| p.display().to_string()).collect(),
            outputs: outputs.iter().map(|p| p.display().to_string()).collect(),
            duration_seconds: self.started.elapsed().as_secs_f64(),
        }
    }
}

impl RunManifest {
    /// Write `manifest.json` into the output directory.
    pub fn write(&self, dir: &Path) -> io::Result<PathBuf> {
        let path = dir.join("manifest.json");
        let text = serde_json::to_string_pretty(self)
            .map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))?;
        fs::write(&path, text)?;
        Ok(path)
    }
}

/// Hex SHA-256 of a config's canonical JSON; recorded in eval summaries so a
/// report pins the exact config that produced it.
pub fn config_hash<T: Serialize>(config: &T) -> String {
    let json = serde_json::to_string(config).unwrap_or_default();
    let digest = Sha256::digest(json.as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_round_trips_as_json() {
        let dir = tempfile::tempdir().unwrap();
        let timer = ManifestTimer::start("fusian test");
        let manifest = timer.finish(
            42,
            serde_json::json!({"k": 1}),
            vec![PathBuf::from("in.json")],
            vec![PathBuf::from("out.json")],
        );
        let path = manifest.write(dir.path()).unwrap();
        let text = std::fs::read_to_string(path).unwrap();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["seed"], 42);
        assert_eq!(v["config"]["k"], 1);
        assert!(v["duration_seconds"].as_f64().unwrap() >= 0.0);
    }

    #[test]
    fn config_hash_is_stable_and_sensitive() {
        let a = serde_json::json!({"x": 1, "y": 2.0});
        let b = serde_json::json!({"x": 1, "y": 2.5});
        assert_eq!(config_hash(&a), config_hash(&a));
        assert_ne!(config_hash(&a), config_hash(&b));
        assert_eq!(config_hash(&a).len(), 64);
    }
}
