//! Structured matrix families.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::matrix::{check_dim, SymmetricMatrix};
use crate::linalg::sparse::{abs_pow, is_in_sparse_class, SparseClass};
use crate::linalg::spectral::spectral_radius;
use crate::scalar::Real;

pub fn gen_identity<T: Real>(p: usize) -> Result<SymmetricMatrix<T>> {
    SymmetricMatrix::from_upper_fn(p, |j, k| if j == k { T::one() } else { T::zero() })
}

pub fn gen_zero<T: Real>(p: usize) -> Result<SymmetricMatrix<T>> {
    SymmetricMatrix::from_upper_fn(p, |_, _| T::zero())
}

/// The all-ones matrix.
pub fn gen_ones<T: Real>(p: usize) -> Result<SymmetricMatrix<T>> {
    SymmetricMatrix::from_upper_fn(p, |_, _| T::one())
}

fn block_dim(m: usize, k: usize) -> Result<usize> {
    if m == 0 || k == 0 {
        return Err(Error::Dimension("block count and block size must be at least 1".into()));
    }
    let p = m.checked_mul(k).ok_or(Error::SizeLimit {
        requested: usize::MAX,
        cap: crate::linalg::matrix::MAX_DIM,
    })?;
    check_dim(p)?;
    Ok(p)
}

/// Block diagonal with `m` all-ones `k x k` blocks; `p = m k`.
pub fn gen_block_ones<T: Real>(m: usize, k: usize) -> Result<SymmetricMatrix<T>> {
    let p = block_dim(m, k)?;
    SymmetricMatrix::from_upper_fn(p, |j, l| if j / k == l / k { T::one() } else { T::zero() })
}

/// Block diagonal with `blocks` copies of `1_{b x b} + Id_{b x b}`.
pub fn gen_block_ones_plus_identity<T: Real>(blocks: usize, size: usize) -> Result<SymmetricMatrix<T>> {
    let ones = gen_block_ones::<T>(blocks, size)?;
    let p = ones.dim();
    SymmetricMatrix::from_upper_fn(p, |j, k| ones.get(j, k) + if j == k { T::one() } else { T::zero() })
}

/// Symmetric matrix with iid uniform(-1, 1) upper-triangle entries.
pub fn gen_uniform_random<T: Real>(p: usize, seed: u64) -> Result<SymmetricMatrix<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    SymmetricMatrix::from_upper_fn(p, |_, _| T::lit(rng.random_range(-1.0..1.0)))
}

/// Draws a member of the strong l^r sparse class `G_r(M_p)` with spectral
/// radius at most `c0`.
///
/// Diagonal entries are drawn in `[0.5, 1]`; off-diagonal entries are
/// placed column by column (rows visited in a seeded random order) while
/// both affected columns stay within the l^r budget. The result is then
/// rescaled so that `rho(A) <= c0` and re-checked for membership.
pub fn gen_sparse_member<T: Real>(
    p: usize,
    r: f64,
    m_p: f64,
    c0: f64,
    seed: u64,
) -> Result<SymmetricMatrix<T>> {
    check_dim(p)?;
    if !(0.0..1.0).contains(&r) {
        return Err(Error::Domain(format!("r must lie in [0, 1), got {r}")));
    }
    if !(c0 > 0.0) || !c0.is_finite() {
        return Err(Error::Domain(format!("C0 must be positive, got {c0}")));
    }
    if !(m_p >= 1.0) {
        return Err(Error::InfeasibleClass(format!(
            "M_p = {m_p} < 1 cannot hold a nonzero diagonal entry of size 1 in every column"
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut a = vec![0.0f64; p * p];
    let mut used = vec![0.0f64; p];
    for j in 0..p {
        let d = rng.random_range(0.5..=1.0);
        a[j * p + j] = d;
        used[j] = abs_pow(d, r);
    }
    place_off_diagonal(&mut a, &mut used, p, r, m_p * (1.0 - 1e-9), &mut rng);

    let mut m = SymmetricMatrix::<T>::from_row_major(p, a.into_iter().map(T::lit).collect())?;
    let rho = spectral_radius(&m)?.to_f64_lossy();
    if rho > c0 {
        m = m.scaled(T::lit(c0 / rho * (1.0 - 1e-9)));
    }
    let class = SparseClass { r, m_p, c0 };
    let check = is_in_sparse_class(&m, &class)?;
    if !check.member {
        return Err(Error::InfeasibleClass(format!(
            "generated matrix failed the membership re-check: {check:?}"
        )));
    }
    Ok(m)
}

/// Greedy placement of off-diagonal entries under a per-column l^r budget.
fn place_off_diagonal(a: &mut [f64], used: &mut [f64], p: usize, r: f64, budget: f64, rng: &mut ChaCha8Rng) {
    let mut order: Vec<usize> = Vec::with_capacity(p);
    for k in 0..p {
        order.clear();
        order.extend((k + 1)..p);
        order.shuffle(rng);
        for &j in &order {
            if used[k] >= budget {
                break;
            }
            let magnitude: f64 = rng.random_range(0.05..0.5);
            let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            let cost = abs_pow(magnitude, r);
            if used[k] + cost <= budget && used[j] + cost <= budget {
                a[k * p + j] = sign * magnitude;
                a[j * p + k] = sign * magnitude;
                used[k] += cost;
                used[j] += cost;
            }
        }
    }
}

/// Spectral bound of the precision alternatives built by [`gen_sparse_precision`].
pub const SPARSE_PRECISION_C0: f64 = 1.5;

/// Positive definite sparse precision matrix `Id + O` in `G_r(M_p)` with
/// `rho <= 1.5` and smallest eigenvalue at least `0.5`.
///
/// `O` has zero diagonal, column l^r budget `M_p - 1`, and is shrunk so
/// that `rho(O) <= 1/2`. Needs `M_p > 1` so that the matrix differs from
/// the identity.
pub fn gen_sparse_precision<T: Real>(p: usize, r: f64, m_p: f64, seed: u64) -> Result<SymmetricMatrix<T>> {
    check_dim(p)?;
    if !(0.0..1.0).contains(&r) {
        return Err(Error::Domain(format!("r must lie in [0, 1), got {r}")));
    }
    if !(m_p > 1.0) {
        return Err(Error::InfeasibleClass(format!(
            "M_p = {m_p} leaves no budget for off-diagonal entries beside a unit diagonal"
        )));
    }
    if p < 2 {
        return Err(Error::InfeasibleClass("a 1 x 1 precision matrix has no off-diagonal entries".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut off = vec![0.0f64; p * p];
    let mut used = vec![0.0f64; p];
    place_off_diagonal(&mut off, &mut used, p, r, (m_p - 1.0) * (1.0 - 1e-9), &mut rng);
    let o = SymmetricMatrix::<f64>::from_row_major(p, off)?;
    let rho = spectral_radius(&o)?;
    let t = if rho >= 0.5 { 0.5 / rho * (1.0 - 1e-9) } else { 1.0 };
    let b = SymmetricMatrix::<T>::from_upper_fn(p, |j, k| {
        T::lit(if j == k { 1.0 } else { t * o.get(j, k) })
    })?;
    let class = SparseClass {
        r,
        m_p,
        c0: SPARSE_PRECISION_C0,
    };
    let check = is_in_sparse_class(&b, &class)?;
    if !check.member {
        return Err(Error::InfeasibleClass(format!(
            "generated precision matrix failed the membership re-check: {check:?}"
        )));
    }
    Ok(b)
}
