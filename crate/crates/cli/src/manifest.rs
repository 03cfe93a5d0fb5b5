//! Run manifests. Every subcommand finishes by writing `manifest.json` into
//! its output directory: the exact parameters it ran with and a SHA-256 over
//! every file it read or wrote. Replaying the manifest's command line must
//! reproduce every output checksum, so the manifest carries no timestamps,
//! host names, or thread counts — nothing a rerun would not reproduce.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Debug, Serialize)]
pub struct FileStamp {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Serialize)]
pub struct Manifest {
    pub command: &'static str,
    /// Flag values as given (or their defaults), minus performance hints.
    pub parameters: BTreeMap<String, serde_json::Value>,
    /// Files the command read, keyed by role, under the paths the caller
    /// gave.
    pub inputs: BTreeMap<String, FileStamp>,
    /// Files the command wrote. These live next to the manifest, so only
    /// the name relative to the output directory is recorded; the manifest
    /// bytes stay identical when the same run lands in a different
    /// directory.
    pub outputs: BTreeMap<String, FileStamp>,
}

impl Manifest {
    pub fn new(command: &'static str) -> Self {
        Manifest {
            command,
            parameters: BTreeMap::new(),
            inputs: BTreeMap::new(),
            outputs: BTreeMap::new(),
        }
    }

    pub fn param<V: Serialize>(&mut self, key: &str, value: V) -> &mut Self {
        let value = serde_json::to_value(value).expect("parameters are plain data");
        self.parameters.insert(key.to_string(), value);
        self
    }

    pub fn input(&mut self, role: &str, path: &Path) -> Result<&mut Self> {
        let stamp = FileStamp {
            path: path.display().to_string(),
            sha256: sha256_file(path)?,
        };
        self.inputs.insert(role.to_string(), stamp);
        Ok(self)
    }

    pub fn output(&mut self, role: &str, dir: &Path, path: &Path) -> Result<&mut Self> {
        let rel = path.strip_prefix(dir).unwrap_or(path);
        let stamp = FileStamp {
            path: rel.display().to_string(),
            sha256: sha256_file(path)?,
        };
        self.outputs.insert(role.to_string(), stamp);
        Ok(self)
    }

    /// Write `dir/manifest.json` and return its path.
    pub fn write(&self, dir: &Path) -> Result<PathBuf> {
        let path = dir.join("manifest.json");
        let file = File::create(&path)
            .with_context(|| format!("creating {}", path.display()))?;
        let mut w = BufWriter::new(file);
        serde_json::to_writer_pretty(&mut w, self)
            .with_context(|| format!("writing {}", path.display()))?;
        w.write_all(b"\n")?;
        w.flush()?;
        Ok(path)
    }
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let mut file = File::open(path)
        .with_context(|| format!("hashing {}", path.display()))?;
    let mut hasher = Sha256::new();
    let mut buf = [0u8; 64 * 1024];
    loop {
        let n = file.read(&mut buf)?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
    }
    Ok(format!("{:x}", hasher.finalize()))
}
