//! Run manifests: every subcommand records its command line, input digests,
//! parameters and output digests next to its outputs, so identical runs are
//! checkable byte-for-byte.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: Vec<String>,
    pub inputs: BTreeMap<String, String>,
    pub parameters: serde_json::Value,
    pub outputs: BTreeMap<String, String>,
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let bytes =
        std::fs::read(path).with_context(|| format!("reading {} for digest", path.display()))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

impl RunManifest {
    pub fn new(command: Vec<String>, parameters: serde_json::Value) -> Self {
        RunManifest {
            tool: "cosoc",
            version: cosoc_core::VERSION,
            command,
            inputs: BTreeMap::new(),
            parameters,
            outputs: BTreeMap::new(),
        }
    }

    pub fn add_input(&mut self, path: &Path) -> Result<()> {
        self.inputs
            .insert(path.display().to_string(), sha256_file(path)?);
        Ok(())
    }

    pub fn add_output(&mut self, path: &Path) -> Result<()> {
        self.outputs
            .insert(path.display().to_string(), sha256_file(path)?);
        Ok(())
    }

    /// Write `<anchor>.run.json` (or `run.json` inside a directory anchor).
    pub fn write(&self, anchor: &Path) -> Result<()> {
        let path = if anchor.is_dir() {
            anchor.join("run.json")
        } else {
            let mut name = anchor.file_name().unwrap_or_default().to_os_string();
            name.push(".run.json");
            anchor.with_file_name(name)
        };
        let json = serde_json::to_string_pretty(self)?;
        std::fs::write(&path, json + "\n")
            .with_context(|| format!("writing run manifest {}", path.display()))?;
        Ok(())
    }
}
