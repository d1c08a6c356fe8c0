//! Matrix text formats.
//!
//! Dense CSV: a first line holding `p`, then `p` rows of `p` comma-separated
//! decimals. Sparse triplets: a first line `p nnz`, then `nnz` lines
//! `i j value` with 1-based indices and `i <= j`; entries are mirrored on
//! load. Writers emit 17 significant digits.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::linalg::matrix::{check_dim, SymmetricMatrix};
use crate::scalar::Real;

/// Formats a value with 17 significant digits.
pub fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

fn parse_f64(tok: &str, line: usize) -> Result<f64> {
    tok.trim()
        .parse::<f64>()
        .map_err(|e| parse_err(line, format!("bad number {tok:?}: {e}")))
}

fn parse_usize(tok: &str, line: usize) -> Result<usize> {
    tok.trim()
        .parse::<usize>()
        .map_err(|e| parse_err(line, format!("bad integer {tok:?}: {e}")))
}

/// Non-empty lines with their 1-based line numbers.
fn content_lines(reader: impl BufRead) -> Result<Vec<(usize, String)>> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if !line.trim().is_empty() {
            out.push((i + 1, line));
        }
    }
    Ok(out)
}

pub fn read_dense<T: Real>(reader: impl BufRead) -> Result<SymmetricMatrix<T>> {
    let lines = content_lines(reader)?;
    let (first_no, first) = lines.first().ok_or_else(|| parse_err(1, "empty input"))?;
    let p = parse_usize(first, *first_no)?;
    check_dim(p)?;
    if lines.len() != p + 1 {
        return Err(parse_err(
            lines.last().map_or(1, |l| l.0),
            format!("expected {p} matrix rows, found {}", lines.len() - 1),
        ));
    }
    let mut data = Vec::with_capacity(p * p);
    for (no, line) in &lines[1..] {
        let row: Vec<&str> = line.split(',').collect();
        if row.len() != p {
            return Err(parse_err(*no, format!("expected {p} values, found {}", row.len())));
        }
        for tok in row {
            data.push(T::lit(parse_f64(tok, *no)?));
        }
    }
    SymmetricMatrix::from_row_major(p, data)
}

pub fn read_triplets<T: Real>(reader: impl BufRead) -> Result<SymmetricMatrix<T>> {
    let lines = content_lines(reader)?;
    let (first_no, first) = lines.first().ok_or_else(|| parse_err(1, "empty input"))?;
    let header: Vec<&str> = first.split_whitespace().collect();
    if header.len() != 2 {
        return Err(parse_err(*first_no, "header must be `p nnz`"));
    }
    let p = parse_usize(header[0], *first_no)?;
    let nnz = parse_usize(header[1], *first_no)?;
    check_dim(p)?;
    if lines.len() != nnz + 1 {
        return Err(parse_err(
            lines.last().map_or(1, |l| l.0),
            format!("header declares {nnz} entries, found {}", lines.len() - 1),
        ));
    }
    let mut data = vec![T::zero(); p * p];
    let mut seen = vec![false; p * p];
    for (no, line) in &lines[1..] {
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != 3 {
            return Err(parse_err(*no, "expected `i j value`"));
        }
        let i = parse_usize(toks[0], *no)?;
        let j = parse_usize(toks[1], *no)?;
        let v = parse_f64(toks[2], *no)?;
        if i == 0 || j == 0 || i > p || j > p {
            return Err(parse_err(*no, format!("index ({i}, {j}) outside 1..={p}")));
        }
        if i > j {
            return Err(parse_err(*no, "only upper-triangle entries (i <= j) are allowed"));
        }
        let (i, j) = (i - 1, j - 1);
        if std::mem::replace(&mut seen[i * p + j], true) {
            return Err(parse_err(*no, format!("duplicate entry ({}, {})", i + 1, j + 1)));
        }
        data[i * p + j] = T::lit(v);
        data[j * p + i] = T::lit(v);
    }
    SymmetricMatrix::from_row_major(p, data)
}

/// Reads either format, deciding by the number of tokens in the header.
pub fn read_matrix<T: Real>(mut reader: impl BufRead) -> Result<SymmetricMatrix<T>> {
    let mut text = String::new();
    reader.read_to_string(&mut text)?;
    let header = text.lines().find(|l| !l.trim().is_empty()).unwrap_or("");
    if header.split_whitespace().count() == 2 {
        read_triplets(text.as_bytes())
    } else {
        read_dense(text.as_bytes())
    }
}

pub fn write_dense<T: Real>(a: &SymmetricMatrix<T>, mut w: impl Write) -> Result<()> {
    writeln!(w, "{}", a.dim())?;
    for j in 0..a.dim() {
        let row: Vec<String> = a.row(j).iter().map(|v| fmt17(v.to_f64_lossy())).collect();
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}

pub fn write_triplets<T: Real>(a: &SymmetricMatrix<T>, mut w: impl Write) -> Result<()> {
    let p = a.dim();
    let entries: Vec<(usize, usize, T)> = (0..p)
        .flat_map(|i| (i..p).map(move |j| (i, j)))
        .map(|(i, j)| (i, j, a.get(i, j)))
        .filter(|(_, _, v)| !v.is_zero())
        .collect();
    writeln!(w, "{p} {}", entries.len())?;
    for (i, j, v) in entries {
        writeln!(w, "{} {} {}", i + 1, j + 1, fmt17(v.to_f64_lossy()))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::generators::gen_sparse_member;
    use proptest::prelude::*;

    #[test]
    fn dense_parse() {
        let a: SymmetricMatrix<f64> = read_dense("2\n1,0.5\n0.5,2\n".as_bytes()).unwrap();
        assert_eq!(a.as_slice(), &[1.0, 0.5, 0.5, 2.0]);
    }

    #[test]
    fn dense_errors() {
        assert!(matches!(read_dense::<f64>("".as_bytes()), Err(Error::Parse { .. })));
        assert!(matches!(
            read_dense::<f64>("2\n1,2\n3\n".as_bytes()),
            Err(Error::Parse { line: 3, .. })
        ));
        assert!(matches!(
            read_dense::<f64>("2\n1,x\n2,1\n".as_bytes()),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            read_dense::<f64>("2\n1,2\n3,1\n".as_bytes()),
            Err(Error::NotSymmetric { .. })
        ));
    }

    #[test]
    fn triplets_mirror_and_validate() {
        let a: SymmetricMatrix<f64> = read_triplets("3 2\n1 1 2.0\n1 3 -1\n".as_bytes()).unwrap();
        assert_eq!(a.get(2, 0), -1.0);
        assert_eq!(a.get(1, 1), 0.0);
        assert!(read_triplets::<f64>("3 1\n2 1 1.0\n".as_bytes()).is_err());
        assert!(read_triplets::<f64>("3 2\n1 1 1\n1 1 2\n".as_bytes()).is_err());
        assert!(read_triplets::<f64>("3 2\n1 1 1\n".as_bytes()).is_err());
        assert!(read_triplets::<f64>("3 1\n4 4 1\n".as_bytes()).is_err());
    }

    #[test]
    fn autodetect() {
        let d: SymmetricMatrix<f64> = read_matrix("1\n5\n".as_bytes()).unwrap();
        let t: SymmetricMatrix<f64> = read_matrix("1 1\n1 1 5\n".as_bytes()).unwrap();
        assert_eq!(d, t);
    }

    proptest! {
        #[test]
        fn writers_roundtrip_exactly(p in 1usize..12, seed in any::<u64>()) {
            let a = gen_sparse_member::<f64>(p, 0.5, 2.0, 3.0, seed).unwrap();
            let mut dense = Vec::new();
            write_dense(&a, &mut dense).unwrap();
            prop_assert_eq!(&read_matrix::<f64>(dense.as_slice()).unwrap(), &a);
            let mut tri = Vec::new();
            write_triplets(&a, &mut tri).unwrap();
            prop_assert_eq!(&read_matrix::<f64>(tri.as_slice()).unwrap(), &a);
        }
    }
}
