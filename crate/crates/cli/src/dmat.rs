//! `DMAT1` text matrices: a magic line, `rows cols`, then one line per row
//! of space-separated values at 17 significant digits.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use equiproj::DenseMatrix;

use crate::error::{CliError, CliResult};

const MAGIC: &str = "DMAT1";

pub fn to_string(m: &DenseMatrix) -> String {
    let mut out = format!("{MAGIC}\n{} {}\n", m.rows(), m.cols());
    for i in 0..m.rows() {
        let row: Vec<String> = m.row(i).iter().map(|v| format!("{v:.16e}")).collect();
        writeln!(out, "{}", row.join(" ")).expect("string write");
    }
    out
}

pub fn parse(text: &str) -> CliResult<DenseMatrix> {
    let bad = |msg: String| CliError::Input(format!("DMAT1: {msg}"));
    let mut lines = text.lines();
    if lines.next().map(str::trim) != Some(MAGIC) {
        return Err(bad("missing magic line".into()));
    }
    let dims: Vec<usize> = lines
        .next()
        .ok_or_else(|| bad("missing shape line".into()))?
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| bad(format!("bad dimension {t:?}"))))
        .collect::<CliResult<_>>()?;
    let [rows, cols] = dims[..] else {
        return Err(bad("shape line needs two integers".into()));
    };
    let mut data = Vec::with_capacity(rows * cols);
    let mut seen = 0;
    for line in lines.filter(|l| !l.trim().is_empty()) {
        let row: Vec<f64> = line
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| bad(format!("bad value {t:?}"))))
            .collect::<CliResult<_>>()?;
        if row.len() != cols {
            return Err(bad(format!("row {seen} has {} values, expected {cols}", row.len())));
        }
        data.extend(row);
        seen += 1;
    }
    if seen != rows {
        return Err(bad(format!("found {seen} rows, expected {rows}")));
    }
    DenseMatrix::new(rows, cols, data).map_err(CliError::from)
}

pub fn read(path: &Path) -> CliResult<DenseMatrix> {
    parse(&fs::read_to_string(path).map_err(|e| CliError::io(path, e))?)
}

pub fn write(path: &Path, m: &DenseMatrix) -> CliResult<()> {
    fs::write(path, to_string(m)).map_err(|e| CliError::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_exact() {
        let m = DenseMatrix::from_fn(3, 4, |i, j| (i as f64 + 0.1).powf(j as f64 + 0.7) * 1e-3 - 1.0 / 3.0);
        let back = parse(&to_string(&m)).unwrap();
        assert_eq!(back.as_slice(), m.as_slice());
        let tiny = DenseMatrix::new(1, 3, vec![f64::MIN_POSITIVE, -0.0, 1e300]).unwrap();
        assert_eq!(parse(&to_string(&tiny)).unwrap().as_slice(), tiny.as_slice());
    }

    #[test]
    fn rejects_malformed_files() {
        assert!(parse("DMAT2\n1 1\n0\n").is_err());
        assert!(parse("DMAT1\n2 2\n1 2\n").is_err());
        assert!(parse("DMAT1\n1 2\n1 x\n").is_err());
        assert!(parse("DMAT1\n1\n1\n").is_err());
    }
}
