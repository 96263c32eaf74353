//! Content-addressed on-disk cache for expensive, deterministic results.
//!
//! Entries are JSON files named by the SHA-256 of the canonical key. They
//! are published by writing a temporary file and renaming it, so readers
//! never observe a partial entry.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::Result;

pub const CACHE_SCHEMA_VERSION: u32 = 1;
pub const CACHE_ENV: &str = "JACQUET_CACHE_DIR";

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CacheKey {
    pub algebra: String,
    pub kind: String,
    pub params: serde_json::Value,
    pub schema_version: u32,
}

impl CacheKey {
    pub fn new(algebra: &str, kind: &str, params: serde_json::Value) -> Self {
        CacheKey {
            algebra: algebra.into(),
            kind: kind.into(),
            params,
            schema_version: CACHE_SCHEMA_VERSION,
        }
    }

    pub fn digest(&self) -> String {
        let canonical = serde_json::to_vec(self).expect("keys serialize");
        hex::encode(Sha256::digest(&canonical))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CacheStatus {
    Hit,
    Miss,
    /// An entry existed but could not be read; it was recomputed.
    Recovered,
    Disabled,
}

#[derive(Debug, Clone)]
pub struct Cache {
    dir: Option<PathBuf>,
}

impl Cache {
    pub fn disabled() -> Self {
        Cache { dir: None }
    }

    pub fn at(dir: impl Into<PathBuf>) -> Self {
        Cache { dir: Some(dir.into()) }
    }

    /// Explicit directory, else `JACQUET_CACHE_DIR`, else disabled.
    pub fn from_env_or(dir: Option<&Path>) -> Self {
        match dir {
            Some(d) => Cache::at(d),
            None => match std::env::var_os(CACHE_ENV) {
                Some(d) if !d.is_empty() => Cache::at(PathBuf::from(d)),
                _ => Cache::disabled(),
            },
        }
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    pub fn path_for(&self, key: &CacheKey) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| d.join(format!("{}.json", key.digest())))
    }

    fn read(&self, path: &Path, key: &CacheKey) -> Option<std::result::Result<serde_json::Value, String>> {
        let bytes = match fs::read(path) {
            Ok(b) => b,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return None,
            Err(e) => return Some(Err(e.to_string())),
        };
        let doc: serde_json::Value = match serde_json::from_slice(&bytes) {
            Ok(v) => v,
            Err(e) => return Some(Err(e.to_string())),
        };
        let stored_key = serde_json::to_value(key).expect("keys serialize");
        if doc.get("key") != Some(&stored_key) {
            return Some(Err("key mismatch".into()));
        }
        match doc.get("value") {
            Some(v) => Some(Ok(v.clone())),
            None => Some(Err("missing value".into())),
        }
    }

    fn write(&self, path: &Path, key: &CacheKey, value: &serde_json::Value) -> std::io::Result<()> {
        let dir = path.parent().expect("cache paths have a parent");
        fs::create_dir_all(dir)?;
        let doc = serde_json::json!({ "key": key, "value": value });
        let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
        tmp.write_all(&serde_json::to_vec(&doc).expect("values serialize"))?;
        tmp.as_file().sync_all()?;
        tmp.persist(path).map_err(|e| e.error)?;
        Ok(())
    }

    /// Returns the cached value for `key` or runs `producer` and stores its
    /// result. I/O failures only cost the caching, never the computation.
    pub fn get_or_compute<F>(&self, key: &CacheKey, producer: F) -> Result<(serde_json::Value, CacheStatus)>
    where
        F: FnOnce() -> Result<serde_json::Value>,
    {
        let Some(path) = self.path_for(key) else {
            return Ok((producer()?, CacheStatus::Disabled));
        };
        let mut status = CacheStatus::Miss;
        match self.read(&path, key) {
            Some(Ok(v)) => return Ok((v, CacheStatus::Hit)),
            Some(Err(e)) => {
                log::warn!("discarding corrupt cache entry {}: {e}", path.display());
                status = CacheStatus::Recovered;
            }
            None => {}
        }
        let value = producer()?;
        if let Err(e) = self.write(&path, key, &value) {
            log::warn!("cache write to {} failed, continuing without cache: {e}", path.display());
        }
        Ok((value, status))
    }
}
