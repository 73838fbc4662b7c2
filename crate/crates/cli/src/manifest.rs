//! Run manifests: inputs, config echo, counts and output hashes. Nothing
//! time- or machine-dependent goes in, so reruns produce identical bytes.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

#[derive(Debug, Serialize)]
pub struct FileEntry {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub inputs: Vec<FileEntry>,
    pub config: Value,
    pub counts: BTreeMap<&'static str, u64>,
    pub outputs: Vec<FileEntry>,
}

pub fn sha256_file(path: &Path) -> CliResult<String> {
    let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

fn entry(path: &Path, shown: String) -> CliResult<FileEntry> {
    Ok(FileEntry {
        path: shown,
        sha256: sha256_file(path)?,
    })
}

/// Inputs are listed by file name only, so the manifest does not depend on
/// where the run happened.
pub fn input_entry(path: &Path) -> CliResult<FileEntry> {
    let name = path.file_name().map_or_else(|| path.display().to_string(), |n| n.to_string_lossy().into_owned());
    entry(path, name)
}

/// Output paths are relative to `base`, the directory holding the manifest.
pub fn output_entry(base: &Path, path: &Path) -> CliResult<FileEntry> {
    let rel = path.strip_prefix(base).unwrap_or(path);
    entry(path, rel.to_string_lossy().replace('\\', "/"))
}

impl Manifest {
    pub fn new(command: &'static str, config: Value) -> Self {
        Manifest {
            tool: "chemaug",
            version: env!("CARGO_PKG_VERSION"),
            command,
            inputs: Vec::new(),
            config,
            counts: BTreeMap::new(),
            outputs: Vec::new(),
        }
    }

    pub fn count(&mut self, key: &'static str, value: usize) -> &mut Self {
        self.counts.insert(key, value as u64);
        self
    }

    pub fn write(&self, path: &Path) -> CliResult<()> {
        let mut text = serde_json::to_string_pretty(self).expect("manifest serializes");
        text.push('\n');
        fs::write(path, text).map_err(|e| CliError::io(path, e))
    }
}

/// `<out>.manifest.json` next to a single output file.
pub fn manifest_path_for_file(out: &Path) -> PathBuf {
    let mut name = out.file_name().unwrap_or_default().to_os_string();
    name.push(".manifest.json");
    out.with_file_name(name)
}

/// Base directory used for relative output paths of a single-file output.
pub fn parent_dir(out: &Path) -> PathBuf {
    out.parent().map(Path::to_path_buf).unwrap_or_default()
}
