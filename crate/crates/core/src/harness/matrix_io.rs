//! MatrixMarket coordinate files and plain-text vectors.
//!
//! Matrix grammar:
//!
//! ```text
//! %%MatrixMarket matrix coordinate real general
//! % any number of comment lines
//! <rows> <cols> <nnz>
//! <i> <j> <value>        (nnz lines, 1-based indices)
//! ```
//!
//! Blank lines are ignored. Duplicate `(i, j)` pairs are rejected. A vector
//! file holds one value per line; blank lines and lines starting with `%` or
//! `#` are skipped.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

/// Sparse matrix with 0-based coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct CooMatrix {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<(usize, usize, f64)>,
}

impl CooMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<(usize, usize, f64)>) -> Result<Self> {
        let mut seen = HashMap::with_capacity(entries.len());
        for (p, &(r, c, v)) in entries.iter().enumerate() {
            if r >= rows || c >= cols {
                return Err(Error::input(format!(
                    "entry ({r}, {c}) outside a {rows} x {cols} matrix"
                )));
            }
            if !v.is_finite() {
                return Err(Error::input(format!("entry ({r}, {c}) is not finite")));
            }
            if seen.insert((r, c), p).is_some() {
                return Err(Error::input(format!("duplicate entry ({r}, {c})")));
            }
        }
        Ok(Self {
            rows,
            cols,
            entries,
        })
    }

    /// Entries grouped by row as `(column, value)` lists.
    pub fn row_lists(&self) -> Vec<Vec<(usize, f64)>> {
        let mut rows = vec![Vec::new(); self.rows];
        for &(r, c, v) in &self.entries {
            rows[r].push((c, v));
        }
        for r in &mut rows {
            r.sort_by_key(|e| e.0);
        }
        rows
    }

    /// `A x`.
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.rows];
        for &(r, c, v) in &self.entries {
            y[r] += v * x[c];
        }
        y
    }
}

fn parse_err(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Parse MatrixMarket text; `path` is only used in error messages.
pub fn parse_matrix_market(text: &str, path: &Path) -> Result<CooMatrix> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    let (hl, header) = lines
        .next()
        .ok_or_else(|| parse_err(path, 1, "empty file"))?;
    let tokens: Vec<String> = header.split_whitespace().map(str::to_lowercase).collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" || tokens[1] != "matrix" {
        return Err(parse_err(path, hl, "expected '%%MatrixMarket matrix coordinate real general'"));
    }
    if tokens[2] != "coordinate" || tokens[3] != "real" || tokens[4] != "general" {
        return Err(parse_err(
            path,
            hl,
            format!(
                "unsupported format '{} {} {}', only 'coordinate real general' is accepted",
                tokens[2], tokens[3], tokens[4]
            ),
        ));
    }
    let mut body = lines.filter(|(_, l)| !l.is_empty() && !l.starts_with('%'));
    let (sl, size) = body
        .next()
        .ok_or_else(|| parse_err(path, hl, "missing size line"))?;
    let dims: Vec<&str> = size.split_whitespace().collect();
    if dims.len() != 3 {
        return Err(parse_err(path, sl, "size line must hold 'rows cols nnz'"));
    }
    let parse_count = |s: &str, what: &str| {
        s.parse::<usize>()
            .map_err(|_| parse_err(path, sl, format!("invalid {what} '{s}'")))
    };
    let rows = parse_count(dims[0], "row count")?;
    let cols = parse_count(dims[1], "column count")?;
    let nnz = parse_count(dims[2], "entry count")?;

    let mut entries = Vec::with_capacity(nnz);
    let mut first_seen: HashMap<(usize, usize), usize> = HashMap::with_capacity(nnz);
    for (ln, line) in body {
        if entries.len() == nnz {
            return Err(parse_err(
                path,
                ln,
                format!("header declares {nnz} entries but the file has more"),
            ));
        }
        let t: Vec<&str> = line.split_whitespace().collect();
        if t.len() != 3 {
            return Err(parse_err(path, ln, "entry must hold 'row col value'"));
        }
        let idx = |s: &str, what: &str, bound: usize| -> Result<usize> {
            let v: usize = s
                .parse()
                .map_err(|_| parse_err(path, ln, format!("invalid {what} index '{s}'")))?;
            if v == 0 {
                return Err(parse_err(path, ln, format!("{what} index 0 (indices are 1-based)")));
            }
            if v > bound {
                return Err(parse_err(
                    path,
                    ln,
                    format!("{what} index {v} exceeds the declared {bound}"),
                ));
            }
            Ok(v - 1)
        };
        let r = idx(t[0], "row", rows)?;
        let c = idx(t[1], "column", cols)?;
        let v: f64 = t[2]
            .parse()
            .map_err(|_| parse_err(path, ln, format!("invalid value '{}'", t[2])))?;
        if !v.is_finite() {
            return Err(parse_err(path, ln, format!("value '{}' is not finite", t[2])));
        }
        if let Some(prev) = first_seen.insert((r, c), ln) {
            return Err(parse_err(
                path,
                ln,
                format!("duplicate entry ({}, {}), first given on line {prev}", r + 1, c + 1),
            ));
        }
        entries.push((r, c, v));
    }
    if entries.len() != nnz {
        return Err(parse_err(
            path,
            text.lines().count(),
            format!("header declares {nnz} entries but the file has {}", entries.len()),
        ));
    }
    Ok(CooMatrix {
        rows,
        cols,
        entries,
    })
}

pub fn read_matrix_market(path: impl AsRef<Path>) -> Result<CooMatrix> {
    let path = path.as_ref();
    parse_matrix_market(&read_text(path)?, path)
}

pub fn format_matrix_market(m: &CooMatrix) -> String {
    let mut s = String::with_capacity(32 * (m.entries.len() + 2));
    s.push_str("%%MatrixMarket matrix coordinate real general\n");
    let _ = writeln!(s, "{} {} {}", m.rows, m.cols, m.entries.len());
    for &(r, c, v) in &m.entries {
        // `{:?}` prints the shortest string that parses back to the same f64
        let _ = writeln!(s, "{} {} {:?}", r + 1, c + 1, v);
    }
    s
}

pub fn write_matrix_market(path: impl AsRef<Path>, m: &CooMatrix) -> Result<()> {
    write_text(path.as_ref(), &format_matrix_market(m))
}

pub fn parse_vector(text: &str, path: &Path) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let l = line.trim();
        if l.is_empty() || l.starts_with('%') || l.starts_with('#') {
            continue;
        }
        let v: f64 = l
            .parse()
            .map_err(|_| parse_err(path, i + 1, format!("invalid value '{l}'")))?;
        if !v.is_finite() {
            return Err(parse_err(path, i + 1, format!("value '{l}' is not finite")));
        }
        out.push(v);
    }
    Ok(out)
}

pub fn read_vector(path: impl AsRef<Path>) -> Result<Vec<f64>> {
    let path = path.as_ref();
    parse_vector(&read_text(path)?, path)
}

pub fn write_vector(path: impl AsRef<Path>, v: &[f64]) -> Result<()> {
    let mut s = String::with_capacity(24 * v.len());
    for x in v {
        let _ = writeln!(s, "{x:?}");
    }
    write_text(path.as_ref(), &s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> &'static Path {
        Path::new("test.mtx")
    }

    #[test]
    fn parses_with_comments() {
        let text = "%%MatrixMarket matrix coordinate real general\n% c\n\n2 3 2\n1 1 1.5\n2 3 -2\n";
        let m = parse_matrix_market(text, p()).unwrap();
        assert_eq!((m.rows, m.cols), (2, 3));
        assert_eq!(m.entries, vec![(0, 0, 1.5), (1, 2, -2.0)]);
    }

    #[test]
    fn count_mismatch_named() {
        let text = "%%MatrixMarket matrix coordinate real general\n2 2 3\n1 1 1\n2 2 1\n";
        let err = parse_matrix_market(text, p()).unwrap_err();
        assert!(err.to_string().contains("declares 3 entries but the file has 2"), "{err}");
        let text = "%%MatrixMarket matrix coordinate real general\n2 2 1\n1 1 1\n2 2 1\n";
        let err = parse_matrix_market(text, p()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 4, .. }), "{err}");
    }

    #[test]
    fn zero_based_index_caught() {
        let text = "%%MatrixMarket matrix coordinate real general\n2 2 1\n0 1 1\n";
        let err = parse_matrix_market(text, p()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, ref message, .. } if message.contains("1-based")));
        let text = "%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1\n";
        assert!(parse_matrix_market(text, p()).is_err());
    }

    #[test]
    fn duplicates_rejected() {
        let text = "%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1\n1 1 2\n";
        let err = parse_matrix_market(text, p()).unwrap_err();
        assert!(err.to_string().contains("first given on line 3"), "{err}");
    }

    #[test]
    fn bad_header() {
        let text = "%%MatrixMarket matrix array real general\n2 2\n";
        assert!(parse_matrix_market(text, p()).is_err());
        assert!(parse_matrix_market("", p()).is_err());
    }

    #[test]
    fn format_roundtrip() {
        let m = CooMatrix::new(3, 2, vec![(0, 1, 0.1), (2, 0, -1e-300), (1, 1, 1.0 / 3.0)]).unwrap();
        let back = parse_matrix_market(&format_matrix_market(&m), p()).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn vector_parse() {
        let v = parse_vector("1\n\n# x\n-2.5e-3\n", p()).unwrap();
        assert_eq!(v, vec![1.0, -2.5e-3]);
        assert!(matches!(parse_vector("1\nx\n", p()), Err(Error::Parse { line: 2, .. })));
    }
}
