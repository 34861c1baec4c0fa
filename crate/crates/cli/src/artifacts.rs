//! Artifact emission: atomic file writes, checksums, and the run manifest.

use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use crate::StageError;

/// Collects artifacts for one run directory; every write is
/// write-temp-then-rename and registers a checksum for the manifest.
pub struct ArtifactSink {
    dir: PathBuf,
    checksums: BTreeMap<String, String>,
}

impl ArtifactSink {
    pub fn new(dir: &Path) -> Result<Self, StageError> {
        fs::create_dir_all(dir).map_err(|e| StageError::Io(format!("{}: {e}", dir.display())))?;
        Ok(ArtifactSink {
            dir: dir.to_path_buf(),
            checksums: BTreeMap::new(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<(), StageError> {
        let io_err = |e: std::io::Error| StageError::Io(format!("{name}: {e}"));
        let path = self.dir.join(name);
        let tmp = self.dir.join(format!("{name}.tmp"));
        fs::write(&tmp, bytes).map_err(io_err)?;
        fs::rename(&tmp, &path).map_err(io_err)?;
        self.checksums
            .insert(name.to_string(), hex::encode(Sha256::digest(bytes)));
        Ok(())
    }

    /// Writes manifest.toml: scenario hash, seed, and per-artifact SHA-256.
    pub fn write_manifest(&self, scenario_hash: &str, seed: u64) -> Result<(), StageError> {
        let io_err = |e: std::io::Error| StageError::Io(format!("manifest.toml: {e}"));
        let mut text = String::new();
        text.push_str(&format!("scenario_hash = \"{scenario_hash}\"\n"));
        text.push_str(&format!("seed = {seed}\n\n[artifacts]\n"));
        for (name, checksum) in &self.checksums {
            text.push_str(&format!("\"{name}\" = \"{checksum}\"\n"));
        }
        let tmp = self.dir.join("manifest.toml.tmp");
        fs::write(&tmp, &text).map_err(io_err)?;
        fs::rename(tmp, self.dir.join("manifest.toml")).map_err(io_err)?;
        Ok(())
    }
}

/// Full round-trip float formatting for CSV cells.
pub fn fmt(value: f64) -> String {
    if value.is_infinite() {
        if value > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{value}")
    }
}
