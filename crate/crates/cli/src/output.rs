//! Artifact writing and the run manifest.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::RunConfig;
use crate::error::Result;

/// Collects the files written by a run, relative to the output directory.
#[derive(Debug)]
pub struct Outputs {
    dir: PathBuf,
    files: Vec<String>,
}

#[derive(Debug, Serialize)]
struct Artifact<'a> {
    path: &'a str,
    sha256: String,
}

#[derive(Debug, Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    library_version: &'static str,
    config: &'a RunConfig,
    artifacts: Vec<Artifact<'a>>,
}

pub const MANIFEST: &str = "manifest.json";

impl Outputs {
    pub fn new(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Outputs { dir: dir.to_path_buf(), files: Vec::new() })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    pub fn bytes(&mut self, name: &str, data: &[u8]) -> Result<()> {
        let path = self.path(name);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        fs::write(path, data)?;
        self.files.push(name.to_string());
        Ok(())
    }

    pub fn json(&mut self, name: &str, value: &impl Serialize) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.bytes(name, text.as_bytes())
    }

    /// Writes `manifest.json` listing every artifact with its SHA-256.
    pub fn finish(mut self, config: &RunConfig) -> Result<Vec<PathBuf>> {
        self.files.sort();
        self.files.dedup();
        let mut artifacts = Vec::with_capacity(self.files.len());
        for f in &self.files {
            let data = fs::read(self.path(f))?;
            artifacts.push(Artifact { path: f, sha256: hex::encode(Sha256::digest(&data)) });
        }
        // the output location is not part of what was computed
        let recorded = RunConfig { out_dir: None, ..config.clone() };
        let manifest = Manifest {
            tool: "legendre-flow",
            version: env!("CARGO_PKG_VERSION"),
            library_version: legendre_flow::VERSION,
            config: &recorded,
            artifacts,
        };
        let mut text = serde_json::to_string_pretty(&manifest)?;
        text.push('\n');
        fs::write(self.path(MANIFEST), text)?;
        let mut paths: Vec<PathBuf> = self.files.iter().map(|f| self.dir.join(f)).collect();
        paths.push(self.path(MANIFEST));
        Ok(paths)
    }
}
