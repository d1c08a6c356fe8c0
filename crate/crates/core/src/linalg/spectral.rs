use crate::error::{domain, Error, Result};
use crate::linalg::eigen::{eigen, EigenMethod};
use crate::linalg::matrix::SymmetricMatrix;
use crate::scalar::{kahan_sum, Real};

/// Singular values of a symmetric matrix (absolute eigenvalues), sorted
/// descending.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralSummary<T> {
    pub singular_values: Vec<T>,
}

impl<T: Real> SpectralSummary<T> {
    /// `|s|_w`, the l^w norm of the singular-value vector (Schatten-w norm).
    pub fn norm(&self, w: T) -> T {
        self.power_sum(w).powf(T::one() / w)
    }

    /// `sum_j s_j^w`, scaled by the largest value to avoid overflow.
    pub fn power_sum(&self, w: T) -> T {
        let top = self.spectral_norm();
        if top.is_zero() {
            return T::zero();
        }
        kahan_sum(self.singular_values.iter().map(|&s| (s / top).powf(w))) * top.powf(w)
    }

    /// `ln sum_j s_j^w`; `-inf` for the zero matrix.
    pub fn ln_power_sum(&self, w: T) -> T {
        let top = self.spectral_norm();
        if top.is_zero() {
            return T::neg_infinity();
        }
        kahan_sum(self.singular_values.iter().map(|&s| (s / top).powf(w))).ln() + w * top.ln()
    }

    pub fn spectral_norm(&self) -> T {
        self.singular_values.first().copied().unwrap_or_else(T::zero)
    }

    /// Norms at the requested exponents, as `(w, |s|_w)` pairs.
    pub fn norms(&self, exponents: &[T]) -> Vec<(T, T)> {
        exponents.iter().map(|&w| (w, self.norm(w))).collect()
    }
}

pub fn singular_values<T: Real>(a: &SymmetricMatrix<T>) -> Result<SpectralSummary<T>> {
    singular_values_with(a, EigenMethod::Auto)
}

pub fn singular_values_with<T: Real>(
    a: &SymmetricMatrix<T>,
    method: EigenMethod,
) -> Result<SpectralSummary<T>> {
    let mut s: Vec<T> = eigen(a, false, method)?.values.into_iter().map(|v| v.abs()).collect();
    s.sort_by(|x, y| y.partial_cmp(x).unwrap_or(std::cmp::Ordering::Equal));
    Ok(SpectralSummary { singular_values: s })
}

/// `rho(A) = max_j |lambda_j|`.
pub fn spectral_radius<T: Real>(a: &SymmetricMatrix<T>) -> Result<T> {
    Ok(singular_values(a)?.spectral_norm())
}

/// Symmetric inverse square root `Omega^{-1/2}`.
pub fn inverse_sqrt<T: Real>(omega: &SymmetricMatrix<T>, eps: T) -> Result<SymmetricMatrix<T>> {
    let e = positive_definite_eigen(omega, eps)?;
    e.reconstruct_with(|l| T::one() / l.sqrt())
}

/// `ln det(Omega)` for a positive definite matrix.
pub fn log_det<T: Real>(omega: &SymmetricMatrix<T>, eps: T) -> Result<T> {
    let values = positive_eigenvalues(omega, eps)?;
    Ok(kahan_sum(values.iter().map(|l| l.ln())))
}

fn positive_definite_eigen<T: Real>(
    omega: &SymmetricMatrix<T>,
    eps: T,
) -> Result<crate::linalg::eigen::SymmetricEigen<T>> {
    if !(eps > T::zero()) {
        return Err(domain("eps must be positive"));
    }
    let e = eigen(omega, true, EigenMethod::Auto)?;
    check_positive(&e.values, eps)?;
    Ok(e)
}

fn positive_eigenvalues<T: Real>(omega: &SymmetricMatrix<T>, eps: T) -> Result<Vec<T>> {
    if !(eps > T::zero()) {
        return Err(domain("eps must be positive"));
    }
    let values = eigen(omega, false, EigenMethod::Auto)?.values;
    check_positive(&values, eps)?;
    Ok(values)
}

fn check_positive<T: Real>(values: &[T], eps: T) -> Result<()> {
    match values.first() {
        Some(&min) if min <= eps => Err(Error::NotPositiveDefinite {
            eigenvalue: min.to_f64_lossy(),
            eps: eps.to_f64_lossy(),
        }),
        _ => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::generators::{gen_block_ones, gen_identity};

    #[test]
    fn singular_values_examples() {
        assert_eq!(
            singular_values(&gen_identity::<f64>(4).unwrap()).unwrap().singular_values,
            vec![1.0; 4]
        );
        let a = SymmetricMatrix::<f64>::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        let s = singular_values(&a).unwrap().singular_values;
        assert!((s[0] - 3.0).abs() < 1e-14 && (s[1] - 1.0).abs() < 1e-14);
        let neg = SymmetricMatrix::<f64>::from_rows(&[vec![-5.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert_eq!(singular_values(&neg).unwrap().singular_values, vec![5.0, 1.0]);
    }

    #[test]
    fn block_ones_spectrum() {
        let s = singular_values(&gen_block_ones::<f64>(3, 4).unwrap()).unwrap();
        for (i, v) in s.singular_values.iter().enumerate() {
            let expected = if i < 3 { 4.0 } else { 0.0 };
            assert!((v - expected).abs() < 1e-9);
        }
        assert!((s.norm(4.0) - 3f64.powf(0.25) * 4.0).abs() < 1e-12);
    }

    #[test]
    fn inverse_sqrt_examples() {
        let id = gen_identity::<f64>(3).unwrap();
        assert_eq!(inverse_sqrt(&id, 1e-12).unwrap(), id);
        let d = SymmetricMatrix::<f64>::diagonal_from(&[4.0, 9.0]).unwrap();
        let r = inverse_sqrt(&d, 1e-12).unwrap();
        assert!((r.get(0, 0) - 0.5).abs() < 1e-15);
        assert!((r.get(1, 1) - 1.0 / 3.0).abs() < 1e-15);
        assert!(r.get(0, 1).abs() < 1e-15);
        let singular = SymmetricMatrix::<f64>::diagonal_from(&[1.0, 0.0]).unwrap();
        assert!(matches!(
            inverse_sqrt(&singular, 1e-12),
            Err(Error::NotPositiveDefinite { .. })
        ));
    }

    #[test]
    fn inverse_sqrt_contract() {
        let a = SymmetricMatrix::<f64>::from_rows(&[
            vec![4.0, 1.0, 0.5],
            vec![1.0, 3.0, 0.2],
            vec![0.5, 0.2, 2.0],
        ])
        .unwrap();
        let r = inverse_sqrt(&a, 1e-12).unwrap();
        let rra = crate::linalg::matrix::matmul(
            3,
            &crate::linalg::matrix::matmul(3, r.as_slice(), r.as_slice()),
            a.as_slice(),
        );
        let err: f64 = rra
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let id = if i % 4 == 0 { 1.0 } else { 0.0 };
                (v - id).powi(2)
            })
            .sum::<f64>()
            .sqrt();
        assert!(err <= 1e-8 * 3.0);
    }

    #[test]
    fn log_det_of_diagonal() {
        let d = SymmetricMatrix::<f64>::diagonal_from(&[2.0, 3.0]).unwrap();
        assert!((log_det(&d, 1e-12).unwrap() - 6f64.ln()).abs() < 1e-15);
    }
}
