//! Output staging. Every file of a run goes to a temp file beside its target
//! first; targets are only replaced once all of them were written.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use tempfile::NamedTempFile;

#[derive(Default)]
pub struct Outputs {
    files: Vec<(PathBuf, Vec<u8>)>,
}

impl Outputs {
    pub fn add(&mut self, path: impl Into<PathBuf>, bytes: impl Into<Vec<u8>>) {
        self.files.push((path.into(), bytes.into()));
    }

    pub fn commit(self) -> Result<()> {
        let mut staged = Vec::with_capacity(self.files.len());
        for (path, bytes) in self.files {
            let dir = parent_dir(&path);
            fs::create_dir_all(dir)
                .with_context(|| format!("cannot create directory {}", dir.display()))?;
            let mut tmp = NamedTempFile::new_in(dir)
                .with_context(|| format!("cannot write {}", path.display()))?;
            tmp.write_all(&bytes)
                .and_then(|_| tmp.flush())
                .with_context(|| format!("cannot write {}", path.display()))?;
            staged.push((tmp, path));
        }
        let mut done: Vec<PathBuf> = Vec::new();
        for (tmp, path) in staged {
            if let Err(e) = tmp.persist(&path) {
                for p in &done {
                    let _ = fs::remove_file(p);
                }
                bail!("cannot write {}: {}", path.display(), e.error);
            }
            done.push(path);
        }
        Ok(())
    }
}

fn parent_dir(path: &Path) -> &Path {
    match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    }
}

/// Fails early when `path` could not be created: its directory is missing
/// or the path names a directory.
pub fn check_output_file(path: &Path) -> Result<()> {
    if path.is_dir() {
        bail!("output {} is a directory", path.display());
    }
    let dir = parent_dir(path);
    if !dir.is_dir() {
        bail!("output directory {} does not exist", dir.display());
    }
    Ok(())
}

/// An output directory may be created, but only inside an existing one.
pub fn check_output_dir(path: &Path) -> Result<()> {
    if path.exists() && !path.is_dir() {
        bail!("output {} is not a directory", path.display());
    }
    if !path.exists() && !parent_dir(path).is_dir() {
        bail!("cannot create {}: parent directory missing", path.display());
    }
    Ok(())
}

pub fn check_input(path: &Path) -> Result<()> {
    if !path.is_file() {
        bail!("input file {} not found", path.display());
    }
    Ok(())
}

pub fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}
