//! Atomic file output.

use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};

/// Writes through a temporary file in the same directory and renames it
/// into place, so readers never see a partial file.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let name = path.file_name().context("output path has no file name")?.to_string_lossy();
    let tmp = dir.join(format!(".{name}.tmp-{}", std::process::id()));
    let mut f = fs::File::create(&tmp).with_context(|| format!("creating {}", tmp.display()))?;
    f.write_all(bytes).and_then(|_| f.sync_all()).with_context(|| format!("writing {}", tmp.display()))?;
    drop(f);
    fs::rename(&tmp, path).with_context(|| format!("renaming {} to {}", tmp.display(), path.display()))
}

/// What happened to an output file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Written {
    Created,
    Replaced,
    /// The file already held exactly these bytes.
    Unchanged,
}

/// [`atomic_write`] that refuses to replace different content unless `overwrite`.
pub fn write_output(path: &Path, bytes: &[u8], overwrite: bool) -> Result<Written> {
    match fs::read(path) {
        Ok(old) if old == bytes => Ok(Written::Unchanged),
        Ok(_) if !overwrite => Err(crate::UsageError(format!(
            "{} exists with different content; pass --overwrite to replace it",
            path.display()
        ))
        .into()),
        Ok(_) => atomic_write(path, bytes).map(|_| Written::Replaced),
        Err(_) => atomic_write(path, bytes).map(|_| Written::Created),
    }
}
