// SPDX-License-Identifier: Apache-2.0

//! Artifact bookkeeping. Every file is hashed and listed in
//! `manifest.json`; if a run fails, the files it wrote are removed.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Result, RgmError};

pub const MANIFEST: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ArtifactEntry {
    pub path: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sha256: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bytes: Option<u64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub subcommand: String,
    pub config_hash: String,
    pub config: serde_json::Value,
    pub artifacts: Vec<ArtifactEntry>,
}

pub struct ArtifactWriter {
    dir: PathBuf,
    created_dir: bool,
    written: Vec<ArtifactEntry>,
}

impl ArtifactWriter {
    pub fn create(dir: &Path) -> Result<Self> {
        let created_dir = !dir.exists();
        fs::create_dir_all(dir).map_err(|e| RgmError::io(dir, e))?;
        Ok(Self { dir: dir.to_path_buf(), created_dir, written: Vec::new() })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn write(&mut self, name: &str, bytes: impl AsRef<[u8]>) -> Result<()> {
        let bytes = bytes.as_ref();
        let path = self.dir.join(name);
        // Listed before writing so a half-written file is still cleaned up.
        self.written.push(ArtifactEntry {
            path: name.to_string(),
            sha256: Some(hex::encode(Sha256::digest(bytes))),
            bytes: Some(bytes.len() as u64),
        });
        fs::write(&path, bytes).map_err(|e| RgmError::io(&path, e))
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.write(name, text)
    }

    pub fn names(&self) -> Vec<&str> {
        self.written.iter().map(|e| e.path.as_str()).collect()
    }

    /// Writes the manifest listing every artifact, sorted by path.
    pub fn finish(mut self, mut manifest: Manifest) -> Result<Manifest> {
        self.written.sort_by(|a, b| a.path.cmp(&b.path));
        manifest.artifacts = self.written.clone();
        let text = serde_json::to_string_pretty(&manifest)? + "\n";
        let path = self.dir.join(MANIFEST);
        fs::write(&path, text).map_err(|e| RgmError::io(&path, e))?;
        Ok(manifest)
    }

    /// Removes everything written so far.
    pub fn abort(self) {
        for e in &self.written {
            let _ = fs::remove_file(self.dir.join(&e.path));
        }
        let _ = fs::remove_file(self.dir.join(MANIFEST));
        if self.created_dir {
            let _ = fs::remove_dir(&self.dir);
        }
    }
}
