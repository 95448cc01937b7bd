//! CSV artifacts: number formatting, provenance header and atomic writes.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::{Error, Result};

/// Formats a value with 9 significant digits in scientific notation. Non-finite
/// values print as `nan`, `inf` or `-inf`.
pub fn format_number(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{x:.8e}")
    }
}

/// Hex SHA-256 of a configuration document, truncated to 16 characters.
pub fn config_hash(text: &str) -> String {
    let digest = Sha256::digest(text.as_bytes());
    digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
}

/// Provenance recorded as the first line of every artifact.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Provenance {
    pub version: String,
    pub config_hash: String,
    pub seed: u64,
}

impl Provenance {
    pub fn new(config_text: &str, seed: u64) -> Self {
        Provenance {
            version: env!("CARGO_PKG_VERSION").to_string(),
            config_hash: config_hash(config_text),
            seed,
        }
    }

    pub fn comment_line(&self) -> String {
        format!("# lean-pet {} config={} seed={}", self.version, self.config_hash, self.seed)
    }
}

/// A comma-separated table built row by row.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Csv {
    columns: Vec<String>,
    rows: Vec<String>,
}

impl Csv {
    pub fn new<S: AsRef<str>>(columns: &[S]) -> Self {
        Csv {
            columns: columns.iter().map(|c| c.as_ref().to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, values: &[f64]) {
        self.rows.push(values.iter().map(|&v| format_number(v)).collect::<Vec<_>>().join(","));
    }

    /// Appends a row of preformatted fields.
    pub fn push_fields<S: AsRef<str>>(&mut self, fields: &[S]) {
        self.rows.push(fields.iter().map(|f| f.as_ref()).collect::<Vec<_>>().join(","));
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Column header plus rows, without provenance.
    pub fn body(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let _ = writeln!(out, "{row}");
        }
        out
    }

    pub fn render(&self, provenance: &Provenance) -> String {
        format!("{}\n{}", provenance.comment_line(), self.body())
    }
}

/// Writes `contents` to `path` through a sibling temporary file and a rename, so
/// readers never observe a partial file.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let io = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let name = path
        .file_name()
        .ok_or_else(|| Error::invalid("path", format!("{} has no file name", path.display())))?;
    let mut tmp_name = std::ffi::OsString::from(".");
    tmp_name.push(name);
    tmp_name.push(format!(".{}.tmp", std::process::id()));
    let tmp = path.with_file_name(tmp_name);
    fs::write(&tmp, contents).map_err(io)?;
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        io(e)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nine_significant_digits() {
        assert_eq!(format_number(1.0), "1.00000000e0");
        assert_eq!(format_number(-0.000123456789123), "-1.23456789e-4");
        assert_eq!(format_number(f64::NAN), "nan");
    }

    #[test]
    fn hash_is_stable_and_short() {
        assert_eq!(config_hash("abc"), "ba7816bf8f01cfea");
    }

    #[test]
    fn rendered_table_starts_with_provenance() {
        let mut csv = Csv::new(&["a", "b"]);
        csv.push(&[1.0, 2.0]);
        let text = csv.render(&Provenance::new("x", 7));
        let mut lines = text.lines();
        assert!(lines.next().unwrap().starts_with("# lean-pet "));
        assert_eq!(lines.next(), Some("a,b"));
        assert_eq!(lines.next(), Some("1.00000000e0,2.00000000e0"));
    }
}
