//! Run directories: the resolved config is written first, artifacts next,
//! and `manifest.json` last so a complete manifest marks a finished run.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use symlie::io::{write_json, CHECKPOINT_VERSION, CSV_VERSION};

use crate::config::ExperimentConfig;
use crate::error::CliResult;

pub const MANIFEST_VERSION: &str = "1.0";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Artifact {
    /// Path relative to the run directory.
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub manifest_version: String,
    pub command: String,
    pub name: String,
    /// SHA-256 of the resolved config as written to `config.json`.
    pub config_hash: String,
    pub artifacts: Vec<Artifact>,
    pub wall_time_s: f64,
    pub versions: BTreeMap<String, String>,
    pub metrics: BTreeMap<String, f64>,
}

/// An open run directory collecting artifacts and metrics.
pub struct Run {
    pub dir: PathBuf,
    pub command: String,
    pub name: String,
    config_hash: String,
    artifacts: Vec<String>,
    pub metrics: BTreeMap<String, f64>,
    started: std::time::Instant,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

impl Run {
    /// Creates `dir` and writes `config.json`.
    pub fn start(dir: PathBuf, command: &str, name: &str, config: &ExperimentConfig) -> CliResult<Run> {
        fs::create_dir_all(&dir)?;
        let text = serde_json::to_string_pretty(config).expect("config serializes");
        symlie::io::write_atomic(&dir.join("config.json"), text.as_bytes())?;
        Ok(Run {
            dir,
            command: command.to_string(),
            name: name.to_string(),
            config_hash: sha256_hex(text.as_bytes()),
            artifacts: vec!["config.json".into()],
            metrics: BTreeMap::new(),
            started: std::time::Instant::now(),
        })
    }

    /// Path of an artifact inside the run directory; the file is recorded in
    /// the manifest.
    pub fn artifact(&mut self, rel: &str) -> PathBuf {
        self.artifacts.push(rel.to_string());
        self.dir.join(rel)
    }

    /// Records a CSV artifact together with its metadata sidecar.
    pub fn csv_artifact(&mut self, rel: &str) -> PathBuf {
        let path = self.artifact(rel);
        let side = symlie::io::sidecar_path(Path::new(rel));
        self.artifacts.push(side.to_string_lossy().into_owned());
        path
    }

    pub fn metric(&mut self, key: impl Into<String>, value: f64) {
        self.metrics.insert(key.into(), value);
    }

    /// Hashes the artifacts and writes `manifest.json`.
    pub fn finish(self) -> CliResult<RunManifest> {
        let mut artifacts = Vec::with_capacity(self.artifacts.len());
        for rel in &self.artifacts {
            let bytes = fs::read(self.dir.join(rel))?;
            artifacts.push(Artifact {
                path: rel.clone(),
                sha256: sha256_hex(&bytes),
            });
        }
        let versions = BTreeMap::from([
            ("symlie".to_string(), env!("CARGO_PKG_VERSION").to_string()),
            ("csv".to_string(), CSV_VERSION.to_string()),
            ("checkpoint".to_string(), CHECKPOINT_VERSION.to_string()),
        ]);
        let manifest = RunManifest {
            manifest_version: MANIFEST_VERSION.into(),
            command: self.command,
            name: self.name,
            config_hash: self.config_hash,
            artifacts,
            wall_time_s: self.started.elapsed().as_secs_f64(),
            versions,
            metrics: self.metrics,
        };
        write_json(&self.dir.join("manifest.json"), &manifest)?;
        Ok(manifest)
    }
}
