//! Output directory bookkeeping and the run manifest.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{LabError, Result};

pub const MANIFEST_NAME: &str = "manifest.json";

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Ok,
    /// A solver did not converge or a check failed; artifacts are complete
    /// as far as they go.
    NonConverged,
    /// The run stopped on an error; artifacts are partial.
    Error,
}

impl RunStatus {
    pub fn exit_code(self) -> i32 {
        match self {
            RunStatus::Ok => 0,
            RunStatus::NonConverged => 2,
            RunStatus::Error => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageRecord {
    pub name: String,
    pub status: String,
    pub wall_time_s: f64,
    #[serde(default)]
    pub detail: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileRecord {
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub scenario: String,
    /// SHA-256 of the configuration file bytes.
    pub config_hash: String,
    pub code_version: String,
    pub seed: u64,
    pub threads: usize,
    pub status: RunStatus,
    /// True unless every stage ran to completion.
    pub partial: bool,
    pub error: Option<String>,
    pub wall_time_s: f64,
    pub stages: Vec<StageRecord>,
    pub files: Vec<FileRecord>,
}

/// Writes artifacts into one directory and records what was written.
pub struct Artifacts {
    dir: PathBuf,
    files: Vec<FileRecord>,
    stages: Vec<StageRecord>,
    started: Instant,
}

impl Artifacts {
    pub fn create(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir).map_err(|e| LabError::io(dir, e))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            files: vec![],
            stages: vec![],
            started: Instant::now(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn files(&self) -> &[FileRecord] {
        &self.files
    }

    pub fn write_bytes(&mut self, name: &str, bytes: &[u8]) -> Result<PathBuf> {
        let path = self.dir.join(name);
        fs::write(&path, bytes).map_err(|e| LabError::io(&path, e))?;
        self.files.retain(|f| f.path != name);
        self.files.push(FileRecord {
            path: name.to_string(),
            sha256: sha256_hex(bytes),
            bytes: bytes.len() as u64,
        });
        Ok(path)
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<PathBuf> {
        let mut s = serde_json::to_string_pretty(value)?;
        s.push('\n');
        self.write_bytes(name, s.as_bytes())
    }

    /// Rows are serialized with their field names as the header.
    pub fn write_csv<T: Serialize>(&mut self, name: &str, rows: &[T]) -> Result<PathBuf> {
        let mut w = csv::Writer::from_writer(vec![]);
        for r in rows {
            w.serialize(r)?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| LabError::Config(format!("csv buffer: {e}")))?;
        self.write_bytes(name, &bytes)
    }

    /// Runs `f` as a named stage and records its outcome.
    pub fn stage<T>(&mut self, name: &str, f: impl FnOnce(&mut Self) -> Result<T>) -> Result<T> {
        let t = Instant::now();
        let out = f(self);
        self.stages.push(StageRecord {
            name: name.to_string(),
            status: if out.is_ok() { "done" } else { "error" }.into(),
            wall_time_s: t.elapsed().as_secs_f64(),
            detail: out.as_ref().err().map(|e| e.to_string()),
        });
        out
    }

    /// Marks the last recorded stage with a solver status.
    pub fn mark_last(&mut self, status: &str, detail: Option<String>) {
        if let Some(s) = self.stages.last_mut() {
            s.status = status.to_string();
            if detail.is_some() {
                s.detail = detail;
            }
        }
    }

    /// Writes `manifest.json`; the manifest lists every other file.
    pub fn finish(
        mut self,
        scenario: &str,
        config_hash: &str,
        seed: u64,
        status: RunStatus,
        error: Option<String>,
    ) -> Result<RunManifest> {
        self.files.sort_by(|a, b| a.path.cmp(&b.path));
        let manifest = RunManifest {
            scenario: scenario.to_string(),
            config_hash: config_hash.to_string(),
            code_version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
            threads: rayon::current_num_threads(),
            status,
            partial: status == RunStatus::Error,
            error,
            wall_time_s: self.started.elapsed().as_secs_f64(),
            stages: self.stages,
            files: self.files,
        };
        let path = self.dir.join(MANIFEST_NAME);
        let mut s = serde_json::to_string_pretty(&manifest)?;
        s.push('\n');
        fs::write(&path, s).map_err(|e| LabError::io(&path, e))?;
        Ok(manifest)
    }
}

/// Recomputes the checksums listed in a manifest; returns the mismatches.
pub fn verify_manifest(dir: &Path) -> Result<Vec<String>> {
    let path = dir.join(MANIFEST_NAME);
    let text = fs::read_to_string(&path).map_err(|e| LabError::io(&path, e))?;
    let m: RunManifest = serde_json::from_str(&text)?;
    let mut bad = vec![];
    for f in &m.files {
        let p = dir.join(&f.path);
        match fs::read(&p) {
            Ok(b) if sha256_hex(&b) == f.sha256 => {}
            _ => bad.push(f.path.clone()),
        }
    }
    Ok(bad)
}
