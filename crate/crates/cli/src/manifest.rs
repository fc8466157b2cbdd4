//! Run manifests: a JSON sidecar per command invocation recording the
//! resolved configuration, input/output digests, and timing, so any output
//! can be traced back to the exact command that produced it.

use std::collections::BTreeMap;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::Serialize;
use sha2::{Digest, Sha256};

use linkcast::Result;

#[derive(Serialize)]
struct RunManifest {
    command: String,
    tool_version: String,
    rng: String,
    hash_algorithm: String,
    seed: Option<u64>,
    config: BTreeMap<String, String>,
    /// Input path → SHA-256 digest, hashed before the command ran.
    inputs: BTreeMap<String, String>,
    /// Output path → SHA-256 digest, hashed after the command finished.
    outputs: BTreeMap<String, String>,
    created_unix: u64,
    duration_ms: u128,
}

pub struct ManifestBuilder {
    command: String,
    seed: Option<u64>,
    config: BTreeMap<String, String>,
    inputs: Vec<PathBuf>,
    outputs: Vec<PathBuf>,
    started: Instant,
}

fn sha256_hex(path: &Path) -> Result<String> {
    let mut file = std::fs::File::open(path)?;
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

impl ManifestBuilder {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.to_string(),
            seed: None,
            config: BTreeMap::new(),
            inputs: Vec::new(),
            outputs: Vec::new(),
            started: Instant::now(),
        }
    }

    pub fn seed(&mut self, seed: u64) -> &mut Self {
        self.seed = Some(seed);
        self
    }

    pub fn arg(&mut self, key: &str, value: impl std::fmt::Display) -> &mut Self {
        self.config.insert(key.to_string(), value.to_string());
        self
    }

    /// Records an input file; its digest is taken when the manifest is
    /// written (inputs are never mutated by commands, so timing is moot).
    pub fn input(&mut self, path: &Path) -> &mut Self {
        self.inputs.push(path.to_path_buf());
        self
    }

    pub fn output(&mut self, path: &Path) -> &mut Self {
        self.outputs.push(path.to_path_buf());
        self
    }

    /// Digests all recorded files and writes the manifest JSON.
    pub fn write(&self, path: &Path) -> Result<()> {
        let digest_map = |paths: &[PathBuf]| -> Result<BTreeMap<String, String>> {
            paths
                .iter()
                .map(|p| Ok((p.display().to_string(), sha256_hex(p)?)))
                .collect()
        };
        let manifest = RunManifest {
            command: self.command.clone(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            rng: linkcast::RNG_ALGORITHM.to_string(),
            hash_algorithm: "sha256".to_string(),
            seed: self.seed,
            config: self.config.clone(),
            inputs: digest_map(&self.inputs)?,
            outputs: digest_map(&self.outputs)?,
            created_unix: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
            duration_ms: self.started.elapsed().as_millis(),
        };
        std::fs::write(path, serde_json::to_string_pretty(&manifest)?)?;
        Ok(())
    }
}

/// Conventional sidecar path: `<output>.manifest.json`.
pub fn sidecar_path(output: &Path) -> PathBuf {
    PathBuf::from(format!("{}.manifest.json", output.display()))
}
