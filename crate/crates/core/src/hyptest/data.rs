use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::linalg::io::fmt17;

/// `n x p` observations, one row per observation.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix {
    n: usize,
    p: usize,
    values: Vec<f64>,
}

impl DataMatrix {
    pub fn new(n: usize, p: usize, values: Vec<f64>) -> Result<Self> {
        if n == 0 || p == 0 {
            return Err(Error::Dimension("data needs n >= 1 and p >= 1".into()));
        }
        if values.len() != n * p {
            return Err(Error::Dimension(format!(
                "expected {} values for {n} x {p} data, got {}",
                n * p,
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { row: i / p, col: i % p });
        }
        Ok(Self { n, p, values })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.p..(i + 1) * self.p]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.p)
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            n: self.n,
            p: self.p,
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }

    /// `(1/n) sum_i x_i x_i^T`, row-major `p x p`.
    pub fn second_moment(&self) -> Vec<f64> {
        let p = self.p;
        let mut s = vec![0.0; p * p];
        for row in self.rows() {
            for j in 0..p {
                for k in 0..p {
                    s[j * p + k] += row[j] * row[k];
                }
            }
        }
        s.iter_mut().for_each(|v| *v /= self.n as f64);
        s
    }

    /// Reads `n p` on the first line, then `n` rows of `p` comma-separated values.
    pub fn read_csv(reader: impl BufRead) -> Result<Self> {
        let mut lines = reader
            .lines()
            .enumerate()
            .filter(|(_, l)| l.as_ref().map_or(true, |s| !s.trim().is_empty()));
        let bad = |line: usize, msg: String| Error::Parse { line, msg };
        let (no, header) = lines.next().ok_or_else(|| bad(1, "empty data file".into()))?;
        let header = header?;
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| bad(no + 1, format!("bad header: {e}")))?;
        let [n, p] = dims[..] else {
            return Err(bad(no + 1, "header must be `n p`".into()));
        };
        let mut values = Vec::with_capacity(n * p);
        let mut rows = 0;
        for (no, line) in lines {
            let line = line?;
            let toks: Vec<&str> = line.split(',').collect();
            if toks.len() != p {
                return Err(bad(no + 1, format!("expected {p} values, found {}", toks.len())));
            }
            for t in toks {
                values.push(
                    t.trim()
                        .parse::<f64>()
                        .map_err(|e| bad(no + 1, format!("bad number {t:?}: {e}")))?,
                );
            }
            rows += 1;
        }
        if rows != n {
            return Err(bad(no + 1, format!("header declares {n} rows, found {rows}")));
        }
        Self::new(n, p, values)
    }

    pub fn write_csv(&self, mut w: impl Write) -> Result<()> {
        writeln!(w, "{} {}", self.n, self.p)?;
        for row in self.rows() {
            let cells: Vec<String> = row.iter().map(|v| fmt17(*v)).collect();
            writeln!(w, "{}", cells.join(","))?;
        }
        Ok(())
    }
}
