//! Content-addressed caching of preprocessed volumes and sweep cells.
//!
//! All writes are atomic (temp file + rename) so an interrupted sweep
//! leaves only complete artifacts behind; re-running recomputes nothing
//! that already exists.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};

use sha2::{Digest, Sha256};

use microexp_core::volume::VideoVolume;

/// Environment variable overriding the cache directory.
pub const CACHE_DIR_ENV: &str = "MICROEXP_CACHE_DIR";

pub fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    let tmp = path.with_extension("tmp~");
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    hex::encode(&hasher.finalize()[..16])
}

#[derive(Debug)]
pub struct Cache {
    root: PathBuf,
    hits: AtomicUsize,
    misses: AtomicUsize,
}

impl Cache {
    /// Cache under `output_dir/cache` unless the environment overrides.
    pub fn for_output_dir(output_dir: &Path) -> Cache {
        let root = std::env::var_os(CACHE_DIR_ENV)
            .map(PathBuf::from)
            .unwrap_or_else(|| output_dir.join("cache"));
        Cache {
            root,
            hits: AtomicUsize::new(0),
            misses: AtomicUsize::new(0),
        }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn hits(&self) -> usize {
        self.hits.load(Ordering::Relaxed)
    }

    pub fn misses(&self) -> usize {
        self.misses.load(Ordering::Relaxed)
    }

    pub fn hit_rate_line(&self) -> String {
        let (h, m) = (self.hits(), self.misses());
        let total = h + m;
        let rate = if total > 0 {
            100.0 * h as f64 / total as f64
        } else {
            0.0
        };
        format!("cache: {h}/{total} hits ({rate:.1}%)")
    }

    /// Fetch or compute a preprocessed volume keyed by the raw volume's
    /// content hash plus the preprocessing recipe.
    pub fn volume(
        &self,
        key: &str,
        compute: impl FnOnce() -> microexp_core::Result<VideoVolume>,
    ) -> microexp_core::Result<VideoVolume> {
        let path = self.root.join("volumes").join(format!("{key}.mxv"));
        if path.exists() {
            if let Ok(v) = VideoVolume::read_cache(&path) {
                self.hits.fetch_add(1, Ordering::Relaxed);
                return Ok(v);
            }
        }
        self.misses.fetch_add(1, Ordering::Relaxed);
        let v = compute()?;
        let _ = write_atomic(&path, &v.to_cache_bytes());
        Ok(v)
    }

    /// Fetch or compute a JSON-serializable sweep cell under the config
    /// hash namespace.
    pub fn cell<T>(
        &self,
        config_hash: &str,
        name: &str,
        compute: impl FnOnce() -> crate::CliResult<T>,
    ) -> crate::CliResult<T>
    where
        T: serde::Serialize + serde::de::DeserializeOwned,
    {
        let path = self
            .root
            .join("cells")
            .join(config_hash)
            .join(format!("{name}.json"));
        if let Ok(text) = fs::read_to_string(&path) {
            if let Ok(v) = serde_json::from_str::<T>(&text) {
                self.hits.fetch_add(1, Ordering::Relaxed);
                return Ok(v);
            }
        }
        self.misses.fetch_add(1, Ordering::Relaxed);
        let v = compute()?;
        let json = serde_json::to_string_pretty(&v).expect("cell serialization");
        write_atomic(&path, json.as_bytes())
            .map_err(|e| crate::CliError::Data(format!("cache write {}: {e}", path.display())))?;
        Ok(v)
    }

    /// All cached cell payloads for a config hash, sorted by file name.
    pub fn cached_cells<T>(&self, config_hash: &str) -> Vec<T>
    where
        T: serde::de::DeserializeOwned,
    {
        let dir = self.root.join("cells").join(config_hash);
        let mut names: Vec<PathBuf> = match fs::read_dir(&dir) {
            Ok(rd) => rd.filter_map(|e| e.ok().map(|e| e.path())).collect(),
            Err(_) => return Vec::new(),
        };
        names.sort();
        names
            .iter()
            .filter_map(|p| fs::read_to_string(p).ok())
            .filter_map(|text| serde_json::from_str(&text).ok())
            .collect()
    }
}
