//! Symmetric eigendecomposition.
//!
//! Two solvers are provided. Cyclic Jacobi is the reference route and the
//! default for small matrices. Householder tridiagonalization followed by
//! implicit QL with Wilkinson shifts handles large matrices, where Jacobi's
//! per-sweep cost of roughly `4 p^3` flops is too slow. Both are
//! deterministic.

use crate::error::{Error, Result};
use crate::linalg::matrix::SymmetricMatrix;
use crate::scalar::Real;

/// Maximum number of Jacobi sweeps before reporting non-convergence.
pub const JACOBI_MAX_SWEEPS: usize = 64;

/// Largest dimension routed to Jacobi by [`EigenMethod::Auto`].
pub const JACOBI_AUTO_MAX_DIM: usize = 64;

const QL_MAX_ITER_PER_VALUE: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EigenMethod {
    #[default]
    Auto,
    Jacobi,
    TridiagonalQl,
}

/// Eigenvalues in ascending order, with eigenvectors stored column-wise
/// (row-major `p x p`, column `i` pairs with `values[i]`) when requested.
#[derive(Debug, Clone)]
pub struct SymmetricEigen<T> {
    pub values: Vec<T>,
    pub vectors: Option<Vec<T>>,
}

impl<T: Real> SymmetricEigen<T> {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// Column `i` of the eigenvector matrix.
    pub fn vector(&self, i: usize) -> Option<Vec<T>> {
        let p = self.dim();
        self.vectors
            .as_ref()
            .map(|v| (0..p).map(|r| v[r * p + i]).collect())
    }

    /// `V f(Lambda) V^T`.
    pub fn reconstruct_with(&self, f: impl Fn(T) -> T) -> Result<SymmetricMatrix<T>> {
        let p = self.dim();
        let v = self
            .vectors
            .as_ref()
            .ok_or_else(|| Error::Dimension("eigenvectors were not computed".into()))?;
        let fl: Vec<T> = self.values.iter().map(|&l| f(l)).collect();
        let mut out = vec![T::zero(); p * p];
        for j in 0..p {
            for k in j..p {
                let mut s = T::zero();
                for i in 0..p {
                    s = s + v[j * p + i] * fl[i] * v[k * p + i];
                }
                out[j * p + k] = s;
                out[k * p + j] = s;
            }
        }
        SymmetricMatrix::from_row_major(p, out)
    }
}

pub fn eigen<T: Real>(
    a: &SymmetricMatrix<T>,
    want_vectors: bool,
    method: EigenMethod,
) -> Result<SymmetricEigen<T>> {
    let method = match method {
        EigenMethod::Auto if a.dim() <= JACOBI_AUTO_MAX_DIM => EigenMethod::Jacobi,
        EigenMethod::Auto => EigenMethod::TridiagonalQl,
        m => m,
    };
    let mut out = match method {
        EigenMethod::Jacobi => jacobi(a, want_vectors)?,
        _ => tridiagonal_ql(a, want_vectors)?,
    };
    sort_ascending(&mut out);
    Ok(out)
}

pub fn eigenvalues<T: Real>(a: &SymmetricMatrix<T>) -> Result<Vec<T>> {
    Ok(eigen(a, false, EigenMethod::Auto)?.values)
}

fn sort_ascending<T: Real>(e: &mut SymmetricEigen<T>) {
    let p = e.dim();
    let mut order: Vec<usize> = (0..p).collect();
    order.sort_by(|&i, &j| {
        e.values[i]
            .partial_cmp(&e.values[j])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    e.values = order.iter().map(|&i| e.values[i]).collect();
    if let Some(v) = &e.vectors {
        let mut sorted = vec![T::zero(); p * p];
        for r in 0..p {
            for (c, &src) in order.iter().enumerate() {
                sorted[r * p + c] = v[r * p + src];
            }
        }
        e.vectors = Some(sorted);
    }
}

/// Cyclic Jacobi rotations. Stops once the off-diagonal Frobenius mass
/// falls to `Real::jacobi_tol() * ||A||_F`.
fn jacobi<T: Real>(m: &SymmetricMatrix<T>, want_vectors: bool) -> Result<SymmetricEigen<T>> {
    let p = m.dim();
    let mut a = m.as_slice().to_vec();
    let mut v = want_vectors.then(|| identity(p));
    let target = T::jacobi_tol() * m.frobenius_norm();

    let mut converged = false;
    for _sweep in 0..JACOBI_MAX_SWEEPS {
        if off_diagonal_norm(p, &a) <= target {
            converged = true;
            break;
        }
        for i in 0..p {
            for j in (i + 1)..p {
                let aij = a[i * p + j];
                if aij.is_zero() {
                    continue;
                }
                let two = T::lit(2.0);
                let theta = (a[j * p + j] - a[i * p + i]) / (two * aij);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                rotate(p, &mut a, i, j, c, s);
                if let Some(v) = v.as_mut() {
                    for r in 0..p {
                        let vri = v[r * p + i];
                        let vrj = v[r * p + j];
                        v[r * p + i] = c * vri - s * vrj;
                        v[r * p + j] = s * vri + c * vrj;
                    }
                }
            }
        }
    }
    if !converged && off_diagonal_norm(p, &a) > target {
        return Err(Error::DecompositionFailed {
            iterations: JACOBI_MAX_SWEEPS,
        });
    }
    Ok(SymmetricEigen {
        values: (0..p).map(|i| a[i * p + i]).collect(),
        vectors: v,
    })
}

/// Applies the rotation zeroing `a[i][j]` to rows and columns `i`, `j`.
fn rotate<T: Real>(p: usize, a: &mut [T], i: usize, j: usize, c: T, s: T) {
    let aii = a[i * p + i];
    let ajj = a[j * p + j];
    let aij = a[i * p + j];
    for r in 0..p {
        if r == i || r == j {
            continue;
        }
        let ari = a[r * p + i];
        let arj = a[r * p + j];
        let new_ri = c * ari - s * arj;
        let new_rj = s * ari + c * arj;
        a[r * p + i] = new_ri;
        a[i * p + r] = new_ri;
        a[r * p + j] = new_rj;
        a[j * p + r] = new_rj;
    }
    let two = T::lit(2.0);
    a[i * p + i] = c * c * aii - two * s * c * aij + s * s * ajj;
    a[j * p + j] = s * s * aii + two * s * c * aij + c * c * ajj;
    a[i * p + j] = T::zero();
    a[j * p + i] = T::zero();
}

fn off_diagonal_norm<T: Real>(p: usize, a: &[T]) -> T {
    let mut s = T::zero();
    for i in 0..p {
        for j in 0..p {
            if i != j {
                s = s + a[i * p + j] * a[i * p + j];
            }
        }
    }
    s.sqrt()
}

fn identity<T: Real>(p: usize) -> Vec<T> {
    let mut v = vec![T::zero(); p * p];
    for i in 0..p {
        v[i * p + i] = T::one();
    }
    v
}

/// Householder reduction to tridiagonal form, then implicit QL.
fn tridiagonal_ql<T: Real>(m: &SymmetricMatrix<T>, want_vectors: bool) -> Result<SymmetricEigen<T>> {
    let p = m.dim();
    let (mut d, mut e, mut z) = tridiagonalize(m, want_vectors);
    ql_implicit(&mut d, &mut e, z.as_deref_mut(), p)?;
    Ok(SymmetricEigen {
        values: d,
        vectors: z,
    })
}

/// Returns the diagonal `d`, the subdiagonal `e` (`e[i] = T[i+1][i]`,
/// `e[p-1] = 0`) and, optionally, the orthogonal `Q` with `A = Q T Q^T`.
fn tridiagonalize<T: Real>(m: &SymmetricMatrix<T>, want_q: bool) -> (Vec<T>, Vec<T>, Option<Vec<T>>) {
    let p = m.dim();
    let mut a = m.as_slice().to_vec();
    let mut d = vec![T::zero(); p];
    let mut e = vec![T::zero(); p];
    // Householder vectors, v_k living on indices k+1..p
    let mut reflectors: Vec<Option<(Vec<T>, T)>> = Vec::with_capacity(p.saturating_sub(2));
    let mut w = vec![T::zero(); p];

    for k in 0..p.saturating_sub(2) {
        let len = p - k - 1;
        let mut x: Vec<T> = (0..len).map(|i| a[(k + 1 + i) * p + k]).collect();
        let scale = x.iter().fold(T::zero(), |s, v| s.max(v.abs()));
        if scale.is_zero() {
            e[k] = T::zero();
            reflectors.push(None);
            continue;
        }
        let norm = scale * x.iter().map(|&v| (v / scale) * (v / scale)).sum::<T>().sqrt();
        let alpha = if x[0] > T::zero() { -norm } else { norm };
        x[0] = x[0] - alpha;
        let vnorm2: T = x.iter().map(|&v| v * v).sum();
        if vnorm2.is_zero() {
            e[k] = alpha;
            reflectors.push(None);
            continue;
        }
        let beta = T::lit(2.0) / vnorm2;
        // w = beta * B v on the trailing block
        for i in 0..len {
            let row = &a[(k + 1 + i) * p + k + 1..(k + 1 + i) * p + p];
            let mut s = T::zero();
            for (bij, vj) in row.iter().zip(&x) {
                s = s + *bij * *vj;
            }
            w[i] = beta * s;
        }
        let vw: T = x.iter().zip(&w[..len]).map(|(a, b)| *a * *b).sum();
        let kk = beta * vw * T::lit(0.5);
        for i in 0..len {
            w[i] = w[i] - kk * x[i];
        }
        for i in 0..len {
            let vi = x[i];
            let wi = w[i];
            let row = &mut a[(k + 1 + i) * p + k + 1..(k + 1 + i) * p + p];
            for j in 0..len {
                row[j] = row[j] - vi * w[j] - wi * x[j];
            }
        }
        e[k] = alpha;
        reflectors.push(Some((x, beta)));
    }
    for i in 0..p {
        d[i] = a[i * p + i];
    }
    if p >= 2 {
        e[p - 2] = a[(p - 1) * p + p - 2];
    }
    e[p - 1] = T::zero();

    let q = want_q.then(|| {
        // Q = H_0 H_1 ... ; accumulate from the right end so each H_k
        // only touches its trailing block.
        let mut q = identity::<T>(p);
        for (k, refl) in reflectors.iter().enumerate().rev() {
            let Some((v, beta)) = refl else { continue };
            let off = k + 1;
            for c in off..p {
                let mut s = T::zero();
                for (i, vi) in v.iter().enumerate() {
                    s = s + *vi * q[(off + i) * p + c];
                }
                let s = s * *beta;
                for (i, vi) in v.iter().enumerate() {
                    q[(off + i) * p + c] = q[(off + i) * p + c] - s * *vi;
                }
            }
        }
        q
    });
    (d, e, q)
}

/// Implicit QL on a symmetric tridiagonal matrix; rotations are applied to
/// the columns of `z` when present.
fn ql_implicit<T: Real>(d: &mut [T], e: &mut [T], mut z: Option<&mut [T]>, p: usize) -> Result<()> {
    let eps = T::epsilon();
    let mut f = T::zero();
    let mut tst1 = T::zero();
    for l in 0..p {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < p {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > QL_MAX_ITER_PER_VALUE {
                    return Err(Error::DecompositionFailed { iterations: iter });
                }
                let g = d[l];
                let mut pp = (d[l + 1] - g) / (T::lit(2.0) * e[l]);
                let mut r = pp.hypot(T::one());
                if pp < T::zero() {
                    r = -r;
                }
                d[l] = e[l] / (pp + r);
                d[l + 1] = e[l] * (pp + r);
                let dl1 = d[l + 1];
                let h = g - d[l];
                for di in d.iter_mut().take(p).skip(l + 2) {
                    *di = *di - h;
                }
                f = f + h;

                pp = d[m];
                let mut c = T::one();
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = T::zero();
                let mut s2 = T::zero();
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    let h = c * pp;
                    r = pp.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = pp / r;
                    pp = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    if let Some(z) = z.as_deref_mut() {
                        for k in 0..p {
                            let h = z[k * p + i + 1];
                            z[k * p + i + 1] = s * z[k * p + i] + c * h;
                            z[k * p + i] = c * z[k * p + i] - s * h;
                        }
                    }
                }
                pp = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * pp;
                d[l] = c * pp;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] = d[l] + f;
        e[l] = T::zero();
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn residual_ok(a: &SymmetricMatrix<f64>, e: &SymmetricEigen<f64>) {
        let tol = 1e-10 * (1.0 + a.frobenius_norm());
        for i in 0..a.dim() {
            let v = e.vector(i).unwrap();
            let av = a.mul_vec(&v);
            let r: f64 = av
                .iter()
                .zip(&v)
                .map(|(x, y)| (x - e.values[i] * y).powi(2))
                .sum::<f64>()
                .sqrt();
            assert!(r <= tol, "residual {r} for pair {i}");
        }
    }

    fn pseudo_random(p: usize, seed: u64) -> SymmetricMatrix<f64> {
        let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        SymmetricMatrix::<f64>::from_upper_fn(p, |_, _| {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        })
        .unwrap()
    }

    #[test]
    fn two_by_two_by_hand() {
        let a = SymmetricMatrix::<f64>::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        for method in [EigenMethod::Jacobi, EigenMethod::TridiagonalQl] {
            let e = eigen(&a, true, method).unwrap();
            assert!((e.values[0] - 1.0).abs() < 1e-14);
            assert!((e.values[1] - 3.0).abs() < 1e-14);
            residual_ok(&a, &e);
        }
    }

    #[test]
    fn solvers_agree_on_random_matrices() {
        for (p, seed) in [(1, 1), (2, 2), (3, 3), (7, 4), (20, 5), (45, 6)] {
            let a = pseudo_random(p, seed);
            let j = eigen(&a, true, EigenMethod::Jacobi).unwrap();
            let q = eigen(&a, true, EigenMethod::TridiagonalQl).unwrap();
            residual_ok(&a, &j);
            residual_ok(&a, &q);
            for (x, y) in j.values.iter().zip(&q.values) {
                assert!((x - y).abs() < 1e-10, "p={p}: {x} vs {y}");
            }
        }
    }

    #[test]
    fn values_only_path_matches_vector_path() {
        let a = pseudo_random(30, 9);
        let with = eigen(&a, true, EigenMethod::TridiagonalQl).unwrap();
        let without = eigen(&a, false, EigenMethod::TridiagonalQl).unwrap();
        assert!(without.vectors.is_none());
        assert_eq!(with.values, without.values);
    }

    #[test]
    fn reconstruction_recovers_matrix() {
        let a = pseudo_random(12, 3);
        let e = eigen(&a, true, EigenMethod::Auto).unwrap();
        let back = e.reconstruct_with(|l| l).unwrap();
        for (x, y) in a.as_slice().iter().zip(back.as_slice()) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_and_diagonal_matrices() {
        let z = SymmetricMatrix::<f64>::from_upper_fn(5, |_, _| 0.0).unwrap();
        assert_eq!(eigenvalues(&z).unwrap(), vec![0.0; 5]);
        let d = SymmetricMatrix::<f64>::diagonal_from(&[3.0, -1.0, 2.0]).unwrap();
        for method in [EigenMethod::Jacobi, EigenMethod::TridiagonalQl] {
            assert_eq!(eigen(&d, false, method).unwrap().values, vec![-1.0, 2.0, 3.0]);
        }
    }

    #[test]
    fn single_precision_route() {
        let a = SymmetricMatrix::<f32>::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        let e = eigen(&a, false, EigenMethod::Jacobi).unwrap();
        assert!((e.values[1] - 3.0).abs() < 1e-5);
    }
}
