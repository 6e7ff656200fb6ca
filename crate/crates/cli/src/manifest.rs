//! Per-stage provenance records. Timestamps live only here.

use std::io::Read;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Debug, Serialize)]
pub struct FileRecord {
    pub role: String,
    pub path: PathBuf,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Debug, Serialize)]
pub struct Manifest {
    pub command: String,
    pub config_hash: String,
    pub seed: u64,
    pub versions: Versions,
    pub timestamp_unix: u64,
    pub inputs: Vec<FileRecord>,
    pub outputs: Vec<FileRecord>,
    pub parameters: serde_json::Value,
}

#[derive(Debug, Serialize)]
pub struct Versions {
    pub access_sentiment: &'static str,
    pub cli: &'static str,
    pub model_format: String,
}

impl Versions {
    pub fn current() -> Self {
        Versions {
            access_sentiment: access_sentiment::VERSION,
            cli: env!("CARGO_PKG_VERSION"),
            model_format: format!(
                "{} v{}",
                access_sentiment::classify::MODEL_FORMAT,
                access_sentiment::classify::MODEL_VERSION
            ),
        }
    }
}

pub fn sha256_file(path: &Path) -> Result<(u64, String)> {
    let mut f = std::fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let mut h = Sha256::new();
    let mut buf = vec![0u8; 1 << 16];
    let mut total = 0u64;
    loop {
        let n = f.read(&mut buf)?;
        if n == 0 {
            break;
        }
        total += n as u64;
        h.update(&buf[..n]);
    }
    Ok((total, format!("{:x}", h.finalize())))
}

pub fn record(role: &str, path: &Path) -> Result<FileRecord> {
    let (bytes, sha256) = sha256_file(path)?;
    Ok(FileRecord {
        role: role.to_string(),
        path: path.to_path_buf(),
        bytes,
        sha256,
    })
}

pub fn now_unix() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}
