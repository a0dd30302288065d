//! One JSON record per run: what was invoked, with which seeds, on which bytes.

use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{LabError, LabResult};
use crate::io::Emitted;

/// Build identifier printed by `--version` and recorded in manifests.
pub const BUILD_ID: &str = concat!("sperner-lab ", env!("CARGO_PKG_VERSION"));

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct FileDigest {
    /// `-` for standard output.
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

impl FileDigest {
    pub fn of(path: &str, bytes: &[u8]) -> Self {
        FileDigest {
            path: path.to_owned(),
            sha256: sha256_hex(bytes),
            bytes: bytes.len() as u64,
        }
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

pub fn unix_millis() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0, |d| d.as_millis() as u64)
}

#[derive(Clone, Debug, Serialize)]
pub struct RunManifest {
    pub command_line: Vec<String>,
    pub version: String,
    pub seeds: Vec<u64>,
    pub jobs: usize,
    pub start_unix_ms: u64,
    pub end_unix_ms: u64,
    pub exit_code: i32,
    pub inputs: Vec<FileDigest>,
    pub outputs: Vec<FileDigest>,
}

impl RunManifest {
    pub fn start(command_line: Vec<String>, jobs: usize) -> Self {
        RunManifest {
            command_line,
            version: BUILD_ID.to_owned(),
            seeds: Vec::new(),
            jobs,
            start_unix_ms: unix_millis(),
            end_unix_ms: 0,
            exit_code: 0,
            inputs: Vec::new(),
            outputs: Vec::new(),
        }
    }

    pub fn input(&mut self, path: &Path, bytes: &[u8]) {
        self.inputs.push(FileDigest::of(&path.display().to_string(), bytes));
    }

    pub fn output(&mut self, emitted: &Emitted) {
        let name = emitted
            .path
            .as_ref()
            .map_or_else(|| "-".to_owned(), |p| p.display().to_string());
        self.outputs.push(FileDigest::of(&name, &emitted.bytes));
    }

    /// First output that went to a file.
    pub fn primary_file(&self) -> Option<PathBuf> {
        self.outputs
            .iter()
            .find(|o| o.path != "-")
            .map(|o| PathBuf::from(&o.path))
    }

    pub fn finish(&mut self, exit_code: i32) {
        self.end_unix_ms = unix_millis();
        self.exit_code = exit_code;
    }

    /// Writes to `path`, or as one line on stderr.
    pub fn write(&self, path: Option<&Path>) -> LabResult<()> {
        match path {
            Some(p) => {
                let mut bytes = serde_json::to_vec_pretty(self)
                    .map_err(|e| LabError::Failed(format!("json: {e}")))?;
                bytes.push(b'\n');
                std::fs::write(p, bytes).map_err(|e| LabError::io(p, e))
            }
            None => {
                let line = serde_json::to_string(self)
                    .map_err(|e| LabError::Failed(format!("json: {e}")))?;
                eprintln!("manifest: {line}");
                Ok(())
            }
        }
    }
}

/// `<file>.manifest.json`
pub fn manifest_path_for(output: &Path) -> PathBuf {
    let mut name = output.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}
