//! Output directories with a checksummed manifest.
//!
//! Every file a command produces goes through [`RunDirectory::write`], which
//! records its SHA-256. [`RunDirectory::finish`] writes `manifest.json` with
//! the effective config, the crate version, start/finish timestamps and the
//! file list sorted by name.
//!
//! Timestamps come from the clock unless `SOURCE_DATE_EPOCH` is set, in which
//! case both are pinned to it and a rerun reproduces the manifest byte for
//! byte.

use std::env;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, SystemTime, UNIX_EPOCH};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Environment variable naming the default output root.
pub const OUT_DIR_ENV: &str = "GBBM_OUT_DIR";
pub const MANIFEST: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileEntry {
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub command: String,
    pub version: String,
    pub started: String,
    pub finished: String,
    pub config: serde_json::Value,
    pub files: Vec<FileEntry>,
}

#[derive(Debug)]
pub struct RunDirectory {
    path: PathBuf,
    command: String,
    started: String,
    files: Vec<FileEntry>,
}

/// `explicit`, else `$GBBM_OUT_DIR/<command>`, else `gbbm-out/<command>`.
pub fn resolve_out_dir(explicit: Option<&Path>, command: &str) -> PathBuf {
    match explicit {
        Some(p) => p.to_path_buf(),
        None => env::var_os(OUT_DIR_ENV)
            .map(PathBuf::from)
            .unwrap_or_else(|| PathBuf::from("gbbm-out"))
            .join(command),
    }
}

fn now() -> Result<String> {
    let t = match env::var("SOURCE_DATE_EPOCH") {
        Ok(v) => {
            let secs: u64 = v
                .trim()
                .parse()
                .context("SOURCE_DATE_EPOCH is not an integer")?;
            UNIX_EPOCH + Duration::from_secs(secs)
        }
        Err(_) => SystemTime::now(),
    };
    Ok(humantime::format_rfc3339_seconds(t).to_string())
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

impl RunDirectory {
    /// Create (or reuse) `path`. A stale manifest is removed so that a
    /// half-finished rerun is never mistaken for a complete one.
    pub fn create(path: &Path, command: &str) -> Result<Self> {
        fs::create_dir_all(path).with_context(|| format!("creating {}", path.display()))?;
        let manifest = path.join(MANIFEST);
        if manifest.exists() {
            fs::remove_file(&manifest)?;
        }
        Ok(Self {
            path: path.to_path_buf(),
            command: command.to_string(),
            started: now()?,
            files: Vec::new(),
        })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    /// Write `name` (relative, may contain subdirectories) and record it.
    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<PathBuf> {
        let rel = Path::new(name);
        if rel.is_absolute()
            || rel
                .components()
                .any(|c| matches!(c, std::path::Component::ParentDir))
        {
            bail!("run-directory entries must be relative: {name}");
        }
        if name == MANIFEST {
            bail!("{MANIFEST} is reserved");
        }
        let full = self.path.join(rel);
        if let Some(parent) = full.parent() {
            fs::create_dir_all(parent)?;
        }
        fs::write(&full, bytes).with_context(|| format!("writing {}", full.display()))?;
        self.files.retain(|f| f.path != name);
        self.files.push(FileEntry {
            path: name.to_string(),
            bytes: bytes.len() as u64,
            sha256: sha256_hex(bytes),
        });
        Ok(full)
    }

    pub fn finish(mut self, config: &impl Serialize) -> Result<Manifest> {
        self.files.sort_by(|a, b| a.path.cmp(&b.path));
        let manifest = Manifest {
            command: self.command,
            version: env!("CARGO_PKG_VERSION").to_string(),
            started: self.started,
            finished: now()?,
            config: serde_json::to_value(config)?,
            files: self.files,
        };
        let mut text = serde_json::to_string_pretty(&manifest)?;
        text.push('\n');
        fs::write(self.path.join(MANIFEST), text)?;
        Ok(manifest)
    }
}

pub fn read_manifest(dir: &Path) -> Result<Manifest> {
    let path = dir.join(MANIFEST);
    let text = fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
    Ok(serde_json::from_str(&text)?)
}

/// Files whose contents no longer match the manifest.
pub fn verify_manifest(dir: &Path) -> Result<Vec<String>> {
    let m = read_manifest(dir)?;
    let mut bad = Vec::new();
    for f in &m.files {
        match fs::read(dir.join(&f.path)) {
            Ok(bytes) if sha256_hex(&bytes) == f.sha256 => {}
            _ => bad.push(f.path.clone()),
        }
    }
    Ok(bad)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_tracks_files() {
        let dir = tempfile::tempdir().unwrap();
        let mut rd = RunDirectory::create(dir.path(), "test").unwrap();
        rd.write("b.csv", b"x\n1\n").unwrap();
        rd.write("sub/a.bin", &[0, 1, 2]).unwrap();
        rd.write("b.csv", b"x\n2\n").unwrap();
        let m = rd.finish(&serde_json::json!({"k": 1})).unwrap();
        assert_eq!(m.files.len(), 2);
        assert_eq!(m.files[0].path, "b.csv");
        assert_eq!(m.files[0].sha256, sha256_hex(b"x\n2\n"));
        assert!(verify_manifest(dir.path()).unwrap().is_empty());
        fs::write(dir.path().join("sub/a.bin"), [9]).unwrap();
        assert_eq!(
            verify_manifest(dir.path()).unwrap(),
            vec!["sub/a.bin".to_string()]
        );
    }

    #[test]
    fn rejects_escaping_paths() {
        let dir = tempfile::tempdir().unwrap();
        let mut rd = RunDirectory::create(dir.path(), "test").unwrap();
        assert!(rd.write("../x", b"").is_err());
        assert!(rd.write(MANIFEST, b"").is_err());
    }

    #[test]
    fn known_digest() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }
}
