use std::fs::{self, File, OpenOptions};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

pub const CORPUS: &str = "corpus.bin";
pub const FILTERED: &str = "filtered.bin";
pub const TOPICS: &str = "topics.bin";
pub const FEATURES: &str = "features.bin";
pub const FEATURES_CSV: &str = "features.csv";
pub const MODELS: &str = "models";
pub const EXPERIMENT: &str = "models/experiment.json";
pub const METRICS: &str = "metrics.csv";
pub const EVALUATION: &str = "evaluation.json";
pub const SCATTER: &str = "scatter";
pub const STUDY: &str = "study";
pub const REPORTS: &str = "reports";
const LOCK: &str = ".lock";

/// A directory holding every artifact of one analysis.
pub struct Workspace {
    root: PathBuf,
}

impl Workspace {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Workspace { root: root.into() }
    }

    pub fn path(&self, rel: impl AsRef<Path>) -> PathBuf {
        self.root.join(rel)
    }

    /// Path of an input artifact; fails with the list of what exists when
    /// it is missing.
    pub fn require(&self, rel: &str, produced_by: &str) -> Result<PathBuf> {
        let p = self.path(rel);
        if p.exists() {
            return Ok(p);
        }
        Err(Error::InvalidArgument(format!(
            "{} is missing (run `{produced_by}` first); workspace has: {}",
            p.display(),
            self.listing()
        )))
    }

    /// Relative paths of every artifact, sorted; `(none)` when empty.
    pub fn listing(&self) -> String {
        let mut out = Vec::new();
        collect(&self.root, &self.root, &mut out);
        out.sort();
        if out.is_empty() {
            "(none)".into()
        } else {
            out.join(", ")
        }
    }

    pub fn create(&self, rel: impl AsRef<Path>) -> Result<BufWriter<File>> {
        let p = self.path(rel);
        if let Some(dir) = p.parent() {
            fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        }
        File::create(&p).map(BufWriter::new).map_err(|e| Error::io(&p, e))
    }

    pub fn write_string(&self, rel: impl AsRef<Path>, text: &str) -> Result<()> {
        let p = self.path(rel.as_ref());
        let mut w = self.create(rel)?;
        w.write_all(text.as_bytes()).map_err(|e| Error::io(&p, e))?;
        w.flush().map_err(|e| Error::io(&p, e))
    }

    /// Takes the advisory lock; released when the guard drops.
    pub fn lock(&self) -> Result<LockGuard> {
        fs::create_dir_all(&self.root).map_err(|e| Error::io(&self.root, e))?;
        let path = self.path(LOCK);
        match OpenOptions::new().write(true).create_new(true).open(&path) {
            Ok(mut f) => {
                let _ = writeln!(f, "{}", std::process::id());
                Ok(LockGuard { path })
            }
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => Err(Error::InvalidArgument(format!(
                "workspace is in use by another command ({} exists; remove it if no command is running)",
                path.display()
            ))),
            Err(e) => Err(Error::io(&path, e)),
        }
    }
}

fn collect(root: &Path, dir: &Path, out: &mut Vec<String>) {
    let Ok(entries) = fs::read_dir(dir) else { return };
    for e in entries.flatten() {
        let p = e.path();
        if p.is_dir() {
            collect(root, &p, out);
        } else if p.file_name().is_some_and(|n| n != LOCK) {
            if let Ok(rel) = p.strip_prefix(root) {
                out.push(rel.display().to_string());
            }
        }
    }
}

pub struct LockGuard {
    path: PathBuf,
}

impl Drop for LockGuard {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.path);
    }
}
