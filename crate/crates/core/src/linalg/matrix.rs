use crate::error::{Error, Result};
use crate::scalar::{kahan_sum, Real};

/// Largest dimension accepted by constructors and generators.
pub const MAX_DIM: usize = 4096;

/// Dense real symmetric `p x p` matrix, stored row-major in full.
///
/// Symmetry is checked at construction against a relative tolerance
/// (`Real::symmetry_tol`) and the stored entries are kept exactly as given.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix<T> {
    p: usize,
    data: Vec<T>,
}

impl<T: Real> SymmetricMatrix<T> {
    /// Builds a matrix from row-major entries, validating dimension,
    /// finiteness and symmetry.
    pub fn from_row_major(p: usize, data: Vec<T>) -> Result<Self> {
        check_dim(p)?;
        if data.len() != p * p {
            return Err(Error::Dimension(format!(
                "expected {} entries for p = {p}, got {}",
                p * p,
                data.len()
            )));
        }
        let mut scale = T::one();
        for (idx, v) in data.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite {
                    row: idx / p,
                    col: idx % p,
                });
            }
            scale = scale.max(v.abs());
        }
        let tol = T::symmetry_tol() * scale;
        for j in 0..p {
            for k in (j + 1)..p {
                let gap = (data[j * p + k] - data[k * p + j]).abs();
                if gap > tol {
                    return Err(Error::NotSymmetric {
                        row: j,
                        col: k,
                        gap: gap.to_f64_lossy(),
                        tol: tol.to_f64_lossy(),
                    });
                }
            }
        }
        Ok(Self { p, data })
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let p = rows.len();
        if rows.iter().any(|r| r.len() != p) {
            return Err(Error::Dimension("rows must all have length p".into()));
        }
        Self::from_row_major(p, rows.iter().flatten().copied().collect())
    }

    /// Builds a matrix from the upper triangle of `f(j, k)`, mirroring it.
    pub fn from_upper_fn(p: usize, mut f: impl FnMut(usize, usize) -> T) -> Result<Self> {
        check_dim(p)?;
        let mut data = vec![T::zero(); p * p];
        for j in 0..p {
            for k in j..p {
                let v = f(j, k);
                data[j * p + k] = v;
                data[k * p + j] = v;
            }
        }
        Self::from_row_major(p, data)
    }

    pub fn diagonal_from(diag: &[T]) -> Result<Self> {
        Self::from_upper_fn(diag.len(), |j, k| if j == k { diag[j] } else { T::zero() })
    }

    /// Symmetrizes a nearly symmetric product by averaging with its transpose.
    pub(crate) fn symmetrized(p: usize, mut data: Vec<T>) -> Result<Self> {
        let half = T::lit(0.5);
        for j in 0..p {
            for k in (j + 1)..p {
                let v = (data[j * p + k] + data[k * p + j]) * half;
                data[j * p + k] = v;
                data[k * p + j] = v;
            }
        }
        Self::from_row_major(p, data)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.p
    }

    #[inline]
    pub fn get(&self, j: usize, k: usize) -> T {
        self.data[j * self.p + k]
    }

    pub fn row(&self, j: usize) -> &[T] {
        &self.data[j * self.p..(j + 1) * self.p]
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn diagonal(&self) -> Vec<T> {
        (0..self.p).map(|j| self.get(j, j)).collect()
    }

    pub fn trace(&self) -> T {
        kahan_sum((0..self.p).map(|j| self.get(j, j)))
    }

    /// `sum_jk a_jk^2` in row-major order.
    pub fn frobenius_sq(&self) -> T {
        kahan_sum(self.data.iter().map(|&v| v * v))
    }

    pub fn frobenius_norm(&self) -> T {
        self.frobenius_sq().sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|v| v.is_zero())
    }

    pub fn scaled(&self, c: T) -> Self {
        Self {
            p: self.p,
            data: self.data.iter().map(|&v| v * c).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_dim(other)?;
        Ok(Self {
            p: self.p,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| a - b)
                .collect(),
        })
    }

    /// Symmetric congruence `R M R` for symmetric `R`, symmetrized to remove
    /// rounding asymmetry.
    pub fn congruence(&self, r: &Self) -> Result<Self> {
        self.same_dim(r)?;
        let p = self.p;
        let rm = matmul(p, &r.data, &self.data);
        let rmr = matmul(p, &rm, &r.data);
        Self::symmetrized(p, rmr)
    }

    /// Simultaneous row/column permutation: `out[j][k] = a[perm[j]][perm[k]]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.p {
            return Err(Error::Dimension("permutation length must equal p".into()));
        }
        let mut seen = vec![false; self.p];
        for &i in perm {
            if i >= self.p || std::mem::replace(&mut seen[i], true) {
                return Err(Error::Dimension("not a permutation".into()));
            }
        }
        Ok(Self {
            p: self.p,
            data: (0..self.p * self.p)
                .map(|idx| self.get(perm[idx / self.p], perm[idx % self.p]))
                .collect(),
        })
    }

    /// `x^T A x`, accumulated row by row.
    pub fn quadratic_form(&self, x: &[T]) -> T {
        debug_assert_eq!(x.len(), self.p);
        let mut total = T::zero();
        for (j, row) in self.data.chunks_exact(self.p).enumerate() {
            let mut inner = T::zero();
            for (a, xk) in row.iter().zip(x) {
                inner = inner + *a * *xk;
            }
            total = total + x[j] * inner;
        }
        total
    }

    /// `A x`.
    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        self.data
            .chunks_exact(self.p)
            .map(|row| row.iter().zip(x).fold(T::zero(), |s, (a, b)| s + *a * *b))
            .collect()
    }

    pub fn cast<U: Real>(&self) -> SymmetricMatrix<U> {
        SymmetricMatrix {
            p: self.p,
            data: self
                .data
                .iter()
                .map(|v| U::from_f64(v.to_f64_lossy()).unwrap_or_else(U::nan))
                .collect(),
        }
    }

    fn same_dim(&self, other: &Self) -> Result<()> {
        if self.p != other.p {
            return Err(Error::Dimension(format!(
                "dimension mismatch: {} vs {}",
                self.p, other.p
            )));
        }
        Ok(())
    }
}

pub(crate) fn check_dim(p: usize) -> Result<()> {
    if p == 0 {
        return Err(Error::Dimension("p must be at least 1".into()));
    }
    if p > MAX_DIM {
        return Err(Error::SizeLimit {
            requested: p,
            cap: MAX_DIM,
        });
    }
    Ok(())
}

pub(crate) fn matmul<T: Real>(p: usize, a: &[T], b: &[T]) -> Vec<T> {
    let mut out = vec![T::zero(); p * p];
    for i in 0..p {
        let out_row = &mut out[i * p..(i + 1) * p];
        for l in 0..p {
            let a_il = a[i * p + l];
            if a_il.is_zero() {
                continue;
            }
            for (o, &b_lj) in out_row.iter_mut().zip(&b[l * p..(l + 1) * p]) {
                *o = *o + a_il * b_lj;
            }
        }
    }
    out
}
