//! Report serialization and atomic file output.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{AppError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

impl Format {
    /// `explicit` wins; otherwise a `.csv` extension selects CSV.
    pub fn resolve(explicit: Option<Format>, out: Option<&Path>) -> Format {
        explicit.unwrap_or_else(|| match out.and_then(|p| p.extension()) {
            Some(ext) if ext.eq_ignore_ascii_case("csv") => Format::Csv,
            _ => Format::Json,
        })
    }
}

pub fn to_json<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut bytes =
        serde_json::to_vec_pretty(value).map_err(|e| AppError::invalid(format!("cannot serialize report: {e}")))?;
    bytes.push(b'\n');
    Ok(bytes)
}

pub fn to_csv<R: Serialize>(rows: &[R]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    w.into_inner().map_err(|e| AppError::invalid(format!("cannot serialize csv: {e}")))
}

fn partial_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".partial");
    path.with_file_name(name)
}

/// Writes `bytes` next to `path` and renames into place, so a failed run
/// never leaves a truncated report behind.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = partial_path(path);
    let io = |source| AppError::Io { path: path.to_path_buf(), source };
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result.map_err(io)
}

pub fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(p) => write_atomic(p, bytes),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(bytes)
                .and_then(|_| stdout.flush())
                .map_err(|source| AppError::Io { path: PathBuf::from("<stdout>"), source })
        }
    }
}

/// Shortest decimal with at most `digits` fractional digits.
pub fn trimmed(x: f64, digits: usize) -> String {
    let s = format!("{x:.digits$}");
    if !s.contains('.') {
        return s;
    }
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".to_string()
    } else {
        s.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn format_from_extension() {
        assert_eq!(Format::resolve(None, Some(Path::new("a/b.CSV"))), Format::Csv);
        assert_eq!(Format::resolve(None, Some(Path::new("b.json"))), Format::Json);
        assert_eq!(Format::resolve(None, None), Format::Json);
        assert_eq!(Format::resolve(Some(Format::Json), Some(Path::new("b.csv"))), Format::Json);
    }

    #[test]
    fn trims_decimals() {
        assert_eq!(trimmed(1.9999999999999996, 10), "2");
        assert_eq!(trimmed(64.0, 10), "64");
        assert_eq!(trimmed(0.125, 10), "0.125");
        assert_eq!(trimmed(-1e-12, 10), "0");
    }

    #[test]
    fn atomic_write_replaces_and_cleans_up() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("r.json");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(fs::read(&p).unwrap(), b"two");
        assert!(!partial_path(&p).exists());

        let missing = dir.path().join("no/such/dir/r.json");
        assert!(matches!(write_atomic(&missing, b"x"), Err(AppError::Io { .. })));
    }
}
