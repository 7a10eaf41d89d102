//! Plain-text dense vectors: one value per line.
//!
//! Blank lines and lines starting with `#` or `%` are ignored.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::ParseError;

pub fn read_vector<R: BufRead>(reader: R) -> Result<Vec<f64>, ParseError> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') || t.starts_with('%') {
            continue;
        }
        let v: f64 = t
            .parse()
            .map_err(|_| ParseError::syntax(i + 1, format!("invalid number `{t}`")))?;
        if !v.is_finite() {
            return Err(ParseError::syntax(i + 1, "value is not finite"));
        }
        out.push(v);
    }
    Ok(out)
}

pub fn read_vector_file(path: impl AsRef<Path>) -> Result<Vec<f64>, ParseError> {
    read_vector(BufReader::new(File::open(path)?))
}

pub fn write_vector<W: Write>(values: &[f64], mut out: W) -> std::io::Result<()> {
    for v in values {
        writeln!(out, "{v:.16e}")?;
    }
    out.flush()
}

pub fn write_vector_file(values: &[f64], path: impl AsRef<Path>) -> std::io::Result<()> {
    write_vector(values, BufWriter::new(File::create(path)?))
}
