//! MatrixMarket `coordinate real general` reader and writer.
//!
//! The reader is strict about the header and the entry count, tolerant of
//! comment and blank lines, and sums duplicate coordinates. Allocation is
//! bounded by the number of entries actually present in the input, never by
//! the sizes declared in the header.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{MatrixError, ParseError};
use crate::sparse::SparseRowMatrix;

pub const HEADER: &str = "%%MatrixMarket matrix coordinate real general";

// Upper bound on capacity reserved from a declared entry count.
const MAX_RESERVE: usize = 1 << 16;

fn check_header(line: &str) -> Result<(), ParseError> {
    let tokens: Vec<String> = line.split_whitespace().map(str::to_ascii_lowercase).collect();
    let tokens: Vec<&str> = tokens.iter().map(String::as_str).collect();
    match tokens.as_slice() {
        ["%%matrixmarket", "matrix", "coordinate", field, "general"] => match *field {
            "real" | "integer" | "double" => Ok(()),
            other => Err(ParseError::Header(format!(
                "unsupported field `{other}`, expected real"
            ))),
        },
        ["%%matrixmarket", "matrix", "coordinate", _, sym] => Err(ParseError::Header(format!(
            "unsupported symmetry `{sym}`, expected general"
        ))),
        ["%%matrixmarket", "matrix", format, ..] if *format != "coordinate" => Err(ParseError::Header(format!(
            "unsupported format `{format}`, expected coordinate"
        ))),
        ["%%matrixmarket", ..] => Err(ParseError::Header(format!("malformed banner `{line}`"))),
        _ => Err(ParseError::Header("first line must start with %%MatrixMarket".into())),
    }
}

fn parse_index(tok: &str, line: usize, what: &str) -> Result<usize, ParseError> {
    tok.parse::<usize>()
        .map_err(|_| ParseError::syntax(line, format!("invalid {what} `{tok}`")))
}

/// Reads a MatrixMarket coordinate matrix.
pub fn read_matrix_market<R: BufRead>(reader: R) -> Result<SparseRowMatrix, ParseError> {
    let mut lines = reader.lines().enumerate().map(|(i, l)| (i + 1, l));

    let (_, header) = lines.next().ok_or_else(|| ParseError::Header("empty input".into()))?;
    check_header(&header?)?;

    let mut size: Option<(usize, usize, usize)> = None;
    let mut entries: Vec<(usize, usize, f64)> = Vec::new();
    for (lineno, line) in lines {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('%') {
            continue;
        }
        let toks: Vec<&str> = trimmed.split_whitespace().collect();
        match size {
            None => {
                if toks.len() != 3 {
                    return Err(ParseError::syntax(lineno, "size line must be `rows cols entries`"));
                }
                let m = parse_index(toks[0], lineno, "row count")?;
                let n = parse_index(toks[1], lineno, "column count")?;
                let nnz = parse_index(toks[2], lineno, "entry count")?;
                entries.reserve(nnz.min(MAX_RESERVE));
                size = Some((m, n, nnz));
            }
            Some((m, n, nnz)) => {
                if toks.len() != 3 {
                    return Err(ParseError::syntax(lineno, "entry line must be `row col value`"));
                }
                if entries.len() == nnz {
                    return Err(ParseError::EntryCount {
                        expected: nnz,
                        found: nnz + 1,
                    });
                }
                let i = parse_index(toks[0], lineno, "row index")?;
                let j = parse_index(toks[1], lineno, "column index")?;
                if i == 0 || i > m {
                    return Err(ParseError::syntax(lineno, format!("row index {i} outside 1..={m}")));
                }
                if j == 0 || j > n {
                    return Err(ParseError::syntax(lineno, format!("column index {j} outside 1..={n}")));
                }
                let v: f64 = toks[2]
                    .parse()
                    .map_err(|_| ParseError::syntax(lineno, format!("invalid value `{}`", toks[2])))?;
                if !v.is_finite() {
                    return Err(ParseError::syntax(lineno, "value is not finite"));
                }
                entries.push((i - 1, j - 1, v));
            }
        }
    }
    let (m, n, nnz) = size.ok_or_else(|| ParseError::Header("missing size line".into()))?;
    if entries.len() != nnz {
        return Err(ParseError::EntryCount {
            expected: nnz,
            found: entries.len(),
        });
    }
    if let Some(row) = first_missing_row(&entries, m) {
        return Err(MatrixError::ZeroRow(row).into());
    }
    Ok(SparseRowMatrix::from_triplets(m, n, entries)?)
}

/// First row in `0..m` with no entry at all, found without an `m`-sized buffer.
fn first_missing_row(entries: &[(usize, usize, f64)], m: usize) -> Option<usize> {
    let mut rows: Vec<usize> = entries.iter().map(|e| e.0).collect();
    rows.sort_unstable();
    rows.dedup();
    rows.iter()
        .enumerate()
        .find(|&(pos, &r)| pos != r)
        .map(|(pos, _)| pos)
        .or_else(|| (rows.len() < m).then_some(rows.len()))
}

pub fn read_matrix_market_file(path: impl AsRef<Path>) -> Result<SparseRowMatrix, ParseError> {
    read_matrix_market(BufReader::new(File::open(path)?))
}

/// Writes the matrix with 17 significant digits per value, which reproduces
/// every `f64` exactly on read.
pub fn write_matrix_market<W: Write>(matrix: &SparseRowMatrix, mut out: W) -> std::io::Result<()> {
    writeln!(out, "{HEADER}")?;
    writeln!(out, "{} {} {}", matrix.n_rows(), matrix.n_cols(), matrix.nnz())?;
    for (r, c, v) in matrix.triplets() {
        writeln!(out, "{} {} {:.16e}", r + 1, c + 1, v)?;
    }
    out.flush()
}

pub fn write_matrix_market_file(matrix: &SparseRowMatrix, path: impl AsRef<Path>) -> std::io::Result<()> {
    write_matrix_market(matrix, BufWriter::new(File::create(path)?))
}
