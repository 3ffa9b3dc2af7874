//! Run directories: config loading, the resolved-config snapshot and
//! content-addressed output names.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::de::DeserializeOwned;
use serde::Serialize;
use sha2::{Digest, Sha256};

/// Reads a JSON config, or the defaults when no file is given. Missing
/// fields take their defaults; flags are applied by the caller afterwards.
pub fn load_config<T: DeserializeOwned + Default>(path: Option<&Path>) -> Result<T> {
    let Some(path) = path else {
        return Ok(T::default());
    };
    let text = fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
}

/// Hex prefix of the SHA-256 of the resolved config.
pub fn config_hash(json: &str) -> String {
    Sha256::digest(json.as_bytes())
        .iter()
        .take(6)
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Output location for one invocation. Every file is named
/// `{command}_seed{seed}_{hash}.{suffix}`, so rerunning from the snapshot
/// rewrites the same files.
pub struct RunDir {
    dir: PathBuf,
    stem: String,
}

impl RunDir {
    /// Creates `dir` and writes the snapshot `{stem}.config.json`.
    pub fn create<C: Serialize>(dir: &Path, command: &str, seed: u64, config: &C) -> Result<Self> {
        let json = serde_json::to_string_pretty(config)? + "\n";
        let stem = format!("{command}_seed{seed}_{}", config_hash(&json));
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let run = RunDir {
            dir: dir.to_path_buf(),
            stem,
        };
        fs::write(run.path("config.json"), json)?;
        Ok(run)
    }

    pub fn path(&self, suffix: &str) -> PathBuf {
        self.dir.join(format!("{}.{suffix}", self.stem))
    }

    pub fn writer(&self, suffix: &str) -> Result<(BufWriter<File>, PathBuf)> {
        let path = self.path(suffix);
        let file = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
        Ok((BufWriter::new(file), path))
    }

    pub fn write_json<T: Serialize>(&self, suffix: &str, value: &T) -> Result<PathBuf> {
        let path = self.path(suffix);
        fs::write(&path, serde_json::to_string_pretty(value)? + "\n")?;
        Ok(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_is_stable_and_short() {
        assert_eq!(config_hash("{}"), "44136fa355b3");
        assert_eq!(config_hash("{}").len(), 12);
        assert_ne!(config_hash("{}"), config_hash("{ }"));
    }
}
