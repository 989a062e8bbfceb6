use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::config::hex;
use crate::error::Result;

/// Files produced by one run, held in memory until the run completes so that
/// their contents never depend on task scheduling.
#[derive(Debug, Default)]
pub struct Outputs {
    files: BTreeMap<String, Vec<u8>>,
    seeds: BTreeMap<String, u64>,
}

impl Outputs {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a file at `path`, relative to the output directory.
    pub fn add(&mut self, path: impl Into<String>, bytes: Vec<u8>) {
        self.files.insert(path.into(), bytes);
    }

    pub fn add_json(&mut self, path: impl Into<String>, value: &impl Serialize) -> Result<()> {
        let mut bytes = serde_json::to_vec_pretty(value)?;
        bytes.push(b'\n');
        self.add(path, bytes);
        Ok(())
    }

    pub fn seed(&mut self, task: impl Into<String>, seed: u64) {
        self.seeds.insert(task.into(), seed);
    }

    pub fn file(&self, path: &str) -> Option<&[u8]> {
        self.files.get(path).map(|v| v.as_slice())
    }

    pub fn paths(&self) -> impl Iterator<Item = &str> {
        self.files.keys().map(|s| s.as_str())
    }

    pub fn records(&self) -> Vec<FileRecord> {
        self.files.iter().map(|(p, b)| FileRecord::of(p, b)).collect()
    }

    pub fn seeds(&self) -> &BTreeMap<String, u64> {
        &self.seeds
    }

    /// Writes every file below `outdir`, creating directories as needed.
    pub fn write_all(&self, outdir: &Path) -> Result<()> {
        for (p, bytes) in &self.files {
            let path = outdir.join(p);
            if let Some(parent) = path.parent() {
                std::fs::create_dir_all(parent)?;
            }
            std::fs::write(path, bytes)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileRecord {
    pub path: String,
    pub sha256: String,
    pub bytes: usize,
}

impl FileRecord {
    pub fn of(path: &str, bytes: &[u8]) -> Self {
        FileRecord { path: path.to_string(), sha256: sha256_hex(bytes), bytes: bytes.len() }
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex(&Sha256::digest(bytes))
}

/// Provenance of one run. Timing fields are the only ones that vary between
/// re-runs of the same configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    pub config_hash: String,
    pub config: serde_json::Value,
    pub seeds: BTreeMap<String, u64>,
    pub files: Vec<FileRecord>,
    pub threads: usize,
    pub started_unix: u64,
    pub wall_clock_seconds: f64,
}

impl RunManifest {
    pub fn load(path: &Path) -> Result<Self> {
        Ok(serde_json::from_slice(&std::fs::read(path)?)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        if let Some(parent) = path.parent() {
            if !parent.as_os_str().is_empty() {
                std::fs::create_dir_all(parent)?;
            }
        }
        let mut bytes = serde_json::to_vec_pretty(self)?;
        bytes.push(b'\n');
        std::fs::write(path, bytes)?;
        Ok(())
    }

    /// Paths whose recorded hash differs from `other`'s, or that only one of
    /// the two lists.
    pub fn mismatches(&self, other: &[FileRecord]) -> Vec<String> {
        let a: BTreeMap<&str, &str> = self.files.iter().map(|f| (f.path.as_str(), f.sha256.as_str())).collect();
        let b: BTreeMap<&str, &str> = other.iter().map(|f| (f.path.as_str(), f.sha256.as_str())).collect();
        let mut out: Vec<String> = a
            .iter()
            .filter(|(p, h)| b.get(*p) != Some(*h))
            .map(|(p, _)| p.to_string())
            .collect();
        out.extend(b.keys().filter(|p| !a.contains_key(*p)).map(|p| p.to_string()));
        out
    }
}

/// Wall-clock bookkeeping for a manifest.
pub struct Stopwatch {
    started_unix: u64,
    start: Instant,
}

impl Stopwatch {
    pub fn start() -> Self {
        let started_unix = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        Stopwatch { started_unix, start: Instant::now() }
    }

    pub fn manifest(
        &self,
        command: &str,
        config_hash: String,
        config: serde_json::Value,
        outputs: &Outputs,
        threads: usize,
    ) -> RunManifest {
        RunManifest {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            config_hash,
            config,
            seeds: outputs.seeds().clone(),
            files: outputs.records(),
            threads,
            started_unix: self.started_unix,
            wall_clock_seconds: self.start.elapsed().as_secs_f64(),
        }
    }
}

/// `<file>.manifest.json` next to a single output file.
pub fn sidecar_manifest_path(output: &Path) -> PathBuf {
    let mut name = output.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".manifest.json");
    output.with_file_name(name)
}
