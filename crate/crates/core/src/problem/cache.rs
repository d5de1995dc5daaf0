use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::Result;

/// Environment variable naming the reference-solution cache directory.
pub const CACHE_ENV: &str = "DBC_CACHE_DIR";

/// `$DBC_CACHE_DIR`, or `dirichlet-control-cache` in the system temp dir.
pub fn cache_dir() -> PathBuf {
    match std::env::var_os(CACHE_ENV) {
        Some(d) if !d.is_empty() => PathBuf::from(d),
        _ => std::env::temp_dir().join("dirichlet-control-cache"),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub(super) struct CachedReference {
    pub config_hash: String,
    pub level: usize,
    pub y: Vec<f64>,
    pub z: Vec<f64>,
}

pub(super) fn cache_path(dir: &Path, hash: &str) -> PathBuf {
    dir.join(format!("reference-{hash}.json"))
}

/// Reads a cached entry; unreadable or mismatched files count as misses.
pub(super) fn load(dir: &Path, hash: &str, level: usize) -> Option<CachedReference> {
    let text = fs::read_to_string(cache_path(dir, hash)).ok()?;
    let entry: CachedReference = serde_json::from_str(&text).ok()?;
    (entry.config_hash == hash && entry.level == level).then_some(entry)
}

/// Writes through a temporary file so concurrent readers never see a
/// partial entry.
pub(super) fn store(dir: &Path, entry: &CachedReference) -> Result<()> {
    fs::create_dir_all(dir)?;
    let path = cache_path(dir, &entry.config_hash);
    let tmp = path.with_extension(format!("tmp{}", std::process::id()));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(serde_json::to_string(entry)?.as_bytes())?;
        f.sync_all()?;
    }
    fs::rename(&tmp, &path)?;
    Ok(())
}
