//! Run manifests: what went in, what came out, with content hashes.

use std::collections::BTreeMap;
use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::Settings;
use crate::error::CliError;

pub const MANIFEST: &str = "manifest.json";

#[derive(Debug, Serialize)]
struct FileRecord {
    role: String,
    path: String,
    sha256: String,
}

#[derive(Debug, Serialize)]
struct Manifest<'a> {
    command: &'a str,
    version: &'a str,
    seed: u64,
    config_hash: String,
    config: &'a BTreeMap<String, String>,
    inputs: Vec<FileRecord>,
    outputs: Vec<FileRecord>,
    counts: &'a BTreeMap<String, serde_json::Value>,
}

pub fn sha256_file(path: &Path) -> Result<String, CliError> {
    let mut f = fs::File::open(path).map_err(|e| xlemo::Error::io(path, e))?;
    let mut h = Sha256::new();
    let mut buf = [0u8; 1 << 16];
    loop {
        let n = f.read(&mut buf).map_err(|e| xlemo::Error::io(path, e))?;
        if n == 0 {
            break;
        }
        h.update(&buf[..n]);
    }
    Ok(hex(&h.finalize()))
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// Collects outputs and counts of one run; [`RunRecord::finish`] writes the
/// manifest, which therefore exists only for runs that completed.
pub struct RunRecord {
    pub out: PathBuf,
    outputs: Vec<String>,
    counts: BTreeMap<String, serde_json::Value>,
}

impl RunRecord {
    /// Creates `out` and removes any manifest left by an earlier run.
    pub fn start(out: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(out).map_err(|e| xlemo::Error::io(out, e))?;
        let stale = out.join(MANIFEST);
        if stale.exists() {
            fs::remove_file(&stale).map_err(|e| xlemo::Error::io(&stale, e))?;
        }
        Ok(RunRecord {
            out: out.to_path_buf(),
            outputs: Vec::new(),
            counts: BTreeMap::new(),
        })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }

    /// Writes `contents` to `out/name` and records it.
    pub fn write(&mut self, name: &str, contents: &str) -> Result<(), CliError> {
        let p = self.path(name);
        fs::write(&p, contents).map_err(|e| xlemo::Error::io(&p, e))?;
        self.produced(name);
        Ok(())
    }

    /// Records a file written directly under `out`.
    pub fn produced(&mut self, name: &str) {
        self.outputs.push(name.to_string());
    }

    pub fn count(&mut self, key: &str, value: impl Serialize) {
        self.counts
            .insert(key.to_string(), serde_json::to_value(value).expect("count serializes"));
    }

    pub fn finish(self, command: &str, settings: &Settings, seed: u64) -> Result<(), CliError> {
        let config = settings.resolved();
        let mut h = Sha256::new();
        for (k, v) in config {
            h.update(k.as_bytes());
            h.update(b"=");
            h.update(v.as_bytes());
            h.update(b"\n");
        }
        let inputs = settings
            .inputs()
            .iter()
            .map(|(role, p)| {
                Ok(FileRecord {
                    role: role.clone(),
                    path: p.display().to_string(),
                    sha256: sha256_file(p)?,
                })
            })
            .collect::<Result<Vec<_>, CliError>>()?;
        let outputs = self
            .outputs
            .iter()
            .map(|name| {
                Ok(FileRecord {
                    role: "output".into(),
                    path: name.clone(),
                    sha256: sha256_file(&self.path(name))?,
                })
            })
            .collect::<Result<Vec<_>, CliError>>()?;
        let m = Manifest {
            command,
            version: env!("CARGO_PKG_VERSION"),
            seed,
            config_hash: hex(&h.finalize()),
            config,
            inputs,
            outputs,
            counts: &self.counts,
        };
        let mut text = serde_json::to_string_pretty(&m)?;
        text.push('\n');
        let tmp = self.path("manifest.json.tmp");
        fs::write(&tmp, text).map_err(|e| xlemo::Error::io(&tmp, e))?;
        let dst = self.path(MANIFEST);
        fs::rename(&tmp, &dst).map_err(|e| xlemo::Error::io(&dst, e))?;
        Ok(())
    }
}
