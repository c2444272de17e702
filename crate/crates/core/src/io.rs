//! Plain-text matrix, vector and signal files.
//!
//! Matrix: first line `m n`, then `m` lines of `n` space-separated numbers.
//! A vector is an `m x 1` matrix. Signal: first line `n K`, then `K` lines
//! `index value` with 0-based indices. Numbers are written with 17
//! significant digits so files round-trip exactly.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::DMatrix;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::problem::{SensingMatrix, SparseSignal};
use crate::TOOL_VERSION;

/// First 16 hex digits of the SHA-256 of `text`.
pub fn short_hash(text: &[u8]) -> String {
    hex::encode(&Sha256::digest(text)[..8])
}

/// Provenance comment `# tool-version, seed, spec-hash` that opens every
/// output file, with its trailing newline.
pub fn provenance_line(seed: u64, spec_hash: &str) -> String {
    format!("# {TOOL_VERSION}, {seed}, {spec_hash}\n")
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

/// Nonblank lines with their 1-based line numbers, `#` comments removed.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty())
}

fn parse_header(lines: &mut dyn Iterator<Item = (usize, &str)>) -> Result<(usize, usize, usize)> {
    let (no, line) = lines.next().ok_or_else(|| parse_err(1, "empty file"))?;
    let f: Vec<&str> = line.split_whitespace().collect();
    if f.len() != 2 {
        return Err(parse_err(no, "header must contain two integers"));
    }
    let a = f[0].parse().map_err(|_| parse_err(no, format!("invalid integer `{}`", f[0])))?;
    let b = f[1].parse().map_err(|_| parse_err(no, format!("invalid integer `{}`", f[1])))?;
    Ok((no, a, b))
}

fn parse_f64(s: &str, line: usize) -> Result<f64> {
    s.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| parse_err(line, format!("invalid number `{s}`")))
}

/// Parses a dense matrix.
pub fn parse_dense(text: &str) -> Result<DMatrix<f64>> {
    let mut lines = content_lines(text);
    let (_, m, n) = parse_header(&mut lines)?;
    if m == 0 || n == 0 {
        return Err(parse_err(1, "dimensions must be positive"));
    }
    let mut out = DMatrix::zeros(m, n);
    for i in 0..m {
        let (no, line) = lines
            .next()
            .ok_or_else(|| parse_err(text.lines().count() + 1, format!("expected {m} rows, found {i}")))?;
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() != n {
            return Err(parse_err(no, format!("expected {n} entries, found {}", f.len())));
        }
        for (j, s) in f.iter().enumerate() {
            out[(i, j)] = parse_f64(s, no)?;
        }
    }
    if let Some((no, _)) = lines.next() {
        return Err(parse_err(no, "unexpected extra row"));
    }
    Ok(out)
}

pub fn format_dense(a: &DMatrix<f64>) -> String {
    let mut s = format!("{} {}\n", a.nrows(), a.ncols());
    for i in 0..a.nrows() {
        let row: Vec<String> = (0..a.ncols()).map(|j| format!("{:.16e}", a[(i, j)])).collect();
        s.push_str(&row.join(" "));
        s.push('\n');
    }
    s
}

pub fn parse_matrix(text: &str) -> Result<SensingMatrix> {
    SensingMatrix::new(parse_dense(text)?)
}

pub fn format_matrix(matrix: &SensingMatrix) -> String {
    format_dense(matrix.entries())
}

/// Parses a column vector (`m 1` header).
pub fn parse_vector(text: &str) -> Result<Vec<f64>> {
    let a = parse_dense(text)?;
    if a.ncols() != 1 {
        return Err(parse_err(1, "a vector file must have exactly one column"));
    }
    Ok(a.as_slice().to_vec())
}

pub fn format_vector(v: &[f64]) -> String {
    format_dense(&DMatrix::from_column_slice(v.len(), 1, v))
}

/// Parses a sparse signal. Entries may come in any order.
pub fn parse_signal(text: &str) -> Result<SparseSignal> {
    let mut lines = content_lines(text);
    let (hdr, n, k) = parse_header(&mut lines)?;
    let mut pairs = Vec::with_capacity(k);
    for (no, line) in lines.by_ref().take(k) {
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() != 2 {
            return Err(parse_err(no, "expected `index value`"));
        }
        let idx: usize = f[0].parse().map_err(|_| parse_err(no, format!("invalid index `{}`", f[0])))?;
        pairs.push((idx, parse_f64(f[1], no)?, no));
    }
    if pairs.len() != k {
        return Err(parse_err(hdr, format!("expected {k} entries, found {}", pairs.len())));
    }
    if let Some((no, _)) = lines.next() {
        return Err(parse_err(no, "unexpected extra entry"));
    }
    pairs.sort_by_key(|p| p.0);
    if let Some(w) = pairs.windows(2).find(|w| w[0].0 == w[1].0) {
        return Err(parse_err(w[1].2, format!("duplicate index {}", w[1].0)));
    }
    let (support, values): (Vec<usize>, Vec<f64>) = pairs.iter().map(|p| (p.0, p.1)).unzip();
    SparseSignal::new(n, support, values)
}

pub fn format_signal(x: &SparseSignal) -> String {
    let mut s = format!("{} {}\n", x.n(), x.sparsity());
    for (&i, &v) in x.support().iter().zip(x.values()) {
        let _ = writeln!(s, "{i} {v:.16e}");
    }
    s
}

pub fn read_to_string(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

pub fn write_string(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{generate_gaussian_matrix, generate_sparse_signal, SignalKind};
    use proptest::prelude::*;

    #[test]
    fn matrix_round_trip_is_exact() {
        let phi = generate_gaussian_matrix(5, 7, 3, true);
        let text = format_matrix(&phi);
        assert_eq!(parse_matrix(&text).unwrap(), phi);
    }

    #[test]
    fn signal_round_trip() {
        let x = generate_sparse_signal(50, 6, SignalKind::Gaussian, 2).unwrap();
        assert_eq!(parse_signal(&format_signal(&x)).unwrap(), x);
    }

    #[test]
    fn errors_name_the_line() {
        let err = parse_dense("2 2\n1 2\n3 x\n").unwrap_err();
        assert_eq!(err, Error::Parse { line: 3, message: "invalid number `x`".into() });
        let err = parse_dense("2 2\n1 2 3\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        let err = parse_signal("4 2\n1 1.0\n1 2.0\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }));
        assert!(parse_vector("2 2\n1 2\n3 4\n").is_err());
    }

    proptest! {
        #[test]
        fn any_finite_value_round_trips(v in prop::collection::vec(-1e300f64..1e300, 1..20)) {
            prop_assert_eq!(parse_vector(&format_vector(&v)).unwrap(), v);
        }
    }
}
