//! On-disk result cache.
//!
//! Each entry lives in `<dir>/<sha256(key)>.json` and records its key, the
//! engine version that produced it and a checksum of the payload. Entries are
//! written to a temporary file in the same directory and renamed into place,
//! so readers never observe a partial file and concurrent writers of one key
//! leave one complete copy.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use qcanon_core::ENGINE_VERSION;

use crate::error::CliError;

#[derive(Debug, Serialize, Deserialize)]
struct CacheEntry {
    key: String,
    engine_version: String,
    /// Serialized artifact, stored as text so the checksum covers exact bytes.
    payload: String,
    checksum: String,
}

fn sha256_hex(s: &str) -> String {
    format!("{:x}", Sha256::digest(s.as_bytes()))
}

pub struct Cache {
    dir: Option<PathBuf>,
    pub hits: usize,
    pub misses: usize,
}

impl Cache {
    pub fn new(dir: Option<&Path>) -> Result<Self, CliError> {
        if let Some(d) = dir {
            fs::create_dir_all(d).map_err(|e| CliError::Cache(format!("{}: {e}", d.display())))?;
        }
        Ok(Cache { dir: dir.map(Path::to_path_buf), hits: 0, misses: 0 })
    }

    /// The entry key: the artifact description plus the engine version, so a
    /// change of conventions never reads an old entry.
    fn full_key(key: &str) -> String {
        format!("{ENGINE_VERSION}\n{key}")
    }

    fn path(&self, full_key: &str) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| d.join(format!("{}.json", sha256_hex(full_key))))
    }

    fn read(&self, full_key: &str) -> Option<String> {
        let text = fs::read_to_string(self.path(full_key)?).ok()?;
        let entry: CacheEntry = serde_json::from_str(&text).ok()?;
        let valid = entry.key == full_key
            && entry.engine_version == ENGINE_VERSION
            && entry.checksum == sha256_hex(&entry.payload);
        valid.then_some(entry.payload)
    }

    fn write(&self, full_key: &str, payload: &str) -> Result<(), CliError> {
        let (Some(dir), Some(path)) = (self.dir.as_ref(), self.path(full_key)) else {
            return Ok(());
        };
        let entry = CacheEntry {
            key: full_key.to_string(),
            engine_version: ENGINE_VERSION.to_string(),
            payload: payload.to_string(),
            checksum: sha256_hex(payload),
        };
        let io = |e: std::io::Error| CliError::Cache(format!("{}: {e}", path.display()));
        let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
        tmp.write_all(serde_json::to_string(&entry)?.as_bytes()).map_err(io)?;
        tmp.persist(&path).map_err(|e| io(e.error))?;
        Ok(())
    }

    /// The artifact for `key`, computed on a miss. Fresh results go through
    /// the same serialize/deserialize round trip as cached ones, so output
    /// does not depend on whether the cache was used.
    pub fn get_or_compute<T, F>(&mut self, key: &str, compute: F) -> Result<T, CliError>
    where
        T: Serialize + DeserializeOwned,
        F: FnOnce() -> Result<T, CliError>,
    {
        match self.lookup(key) {
            Some(v) => Ok(v),
            None => self.store(key, &compute()?),
        }
    }

    /// A valid cached artifact for `key`; counts a hit or a miss.
    pub fn lookup<T: DeserializeOwned>(&mut self, key: &str) -> Option<T> {
        let v = self.read(&Self::full_key(key)).and_then(|p| serde_json::from_str(&p).ok());
        match v {
            Some(_) => self.hits += 1,
            None => self.misses += 1,
        }
        v
    }

    /// Persists `value` and returns its round-tripped copy.
    pub fn store<T: Serialize + DeserializeOwned>(&mut self, key: &str, value: &T) -> Result<T, CliError> {
        let payload = serde_json::to_string(value)?;
        self.write(&Self::full_key(key), &payload)?;
        Ok(serde_json::from_str(&payload)?)
    }
}
