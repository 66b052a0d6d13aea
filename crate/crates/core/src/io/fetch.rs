//! Fetching external LIBSVM files (for example the mushrooms set) into a
//! local path. Remote URLs go through the system `curl`.

use super::IoError;
use std::path::Path;
use std::process::Command;

fn io_err(path: &Path, e: impl std::fmt::Display) -> IoError {
    IoError::Io { path: path.display().to_string(), message: e.to_string() }
}

/// Copies `source` to `dest`. `source` is either an `http://`/`https://`
/// URL or a local path. The copy is checked to parse as LIBSVM before it is
/// moved into place.
pub fn fetch_dataset(source: &str, dest: &Path) -> Result<usize, IoError> {
    let partial = dest.with_extension("partial");
    if source.starts_with("http://") || source.starts_with("https://") {
        let status = Command::new("curl")
            .args(["--fail", "--silent", "--show-error", "--location", "--output"])
            .arg(&partial)
            .arg(source)
            .status()
            .map_err(|e| io_err(dest, format!("could not run curl: {e}")))?;
        if !status.success() {
            let _ = std::fs::remove_file(&partial);
            return Err(io_err(dest, format!("curl exited with {status} for {source}")));
        }
    } else {
        std::fs::copy(source, &partial).map_err(|e| io_err(Path::new(source), e))?;
    }
    let rows = match super::load_libsvm(&partial, super::LabelMap::Auto) {
        Ok(d) => d.len(),
        Err(e) => {
            let _ = std::fs::remove_file(&partial);
            return Err(e);
        }
    };
    std::fs::rename(&partial, dest).map_err(|e| io_err(dest, e))?;
    Ok(rows)
}
