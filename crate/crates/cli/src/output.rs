//! CSV and JSON writers. Numbers use the shortest round-trip form, files are
//! UTF-8 with LF line endings.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use metacouple::{CMatrix, Complex64};
use serde::Serialize;

use crate::error::{CliError, Result};

pub const MATRIX_HEADER: &str = "row,col,re_ohm,im_ohm";

pub fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| {
        CliError::Config(format!(
            "cannot create output directory {}: {e}",
            dir.display()
        ))
    })
}

pub fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    let path = dir.join(name);
    fs::write(&path, contents)
        .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))?;
    Ok(path)
}

pub fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<PathBuf> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Config(format!("cannot serialize {name}: {e}")))?;
    text.push('\n');
    write_file(dir, name, &text)
}

pub fn matrix_csv(m: &CMatrix) -> String {
    let n = m.dim();
    let mut out = String::from(MATRIX_HEADER);
    out.push('\n');
    for r in 0..n {
        for c in 0..n {
            let z = m.get(r, c);
            let _ = writeln!(out, "{r},{c},{},{}", z.re, z.im);
        }
    }
    out
}

/// A vector as a one-column matrix: rows 0..n, column 0.
pub fn column_csv(v: &[Complex64]) -> String {
    let mut out = String::from(MATRIX_HEADER);
    out.push('\n');
    for (r, z) in v.iter().enumerate() {
        let _ = writeln!(out, "{r},0,{},{}", z.re, z.im);
    }
    out
}

/// Quote a CSV field when needed.
pub fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComplexOut {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for ComplexOut {
    fn from(z: Complex64) -> Self {
        ComplexOut { re: z.re, im: z.im }
    }
}
