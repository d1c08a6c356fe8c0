use crate::error::{Error, Result};
use crate::hyptest::data::DataMatrix;
use crate::hyptest::pair::PD_EPS;
use crate::linalg::{inverse_sqrt, log_det, SymmetricMatrix};
use crate::scalar::pairwise_sum;

/// `G = A^{-1/2} (A - B) A^{-1/2}`.
pub fn g_matrix(a: &SymmetricMatrix<f64>, b: &SymmetricMatrix<f64>) -> Result<SymmetricMatrix<f64>> {
    let r = inverse_sqrt(a, PD_EPS)?;
    a.sub(b)?.congruence(&r)
}

/// Values of the likelihood ratio statistic for one data set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LrtValue {
    /// `log det(B A^{-1}) + (1/n) sum_i x_i^T (A - B) x_i`.
    pub l_n: f64,
    /// `n (L_n - log det(B A^{-1})) = sum_i x_i^T (A - B) x_i`.
    pub l_star: f64,
    pub log_det_ratio: f64,
}

/// `log det(B A^{-1}) = log det B - log det A`.
pub fn log_det_ratio(a: &SymmetricMatrix<f64>, b: &SymmetricMatrix<f64>) -> Result<f64> {
    Ok(log_det(b, PD_EPS)? - log_det(a, PD_EPS)?)
}

pub fn lrt_statistic(data: &DataMatrix, a: &SymmetricMatrix<f64>, b: &SymmetricMatrix<f64>) -> Result<LrtValue> {
    let ldr = log_det_ratio(a, b)?;
    let diff = a.sub(b)?;
    lrt_with(data, &diff, ldr)
}

/// Statistic from a precomputed `A - B` and `log det(B A^{-1})`.
pub(crate) fn lrt_with(data: &DataMatrix, diff: &SymmetricMatrix<f64>, log_det_ratio: f64) -> Result<LrtValue> {
    if data.p() != diff.dim() {
        return Err(Error::Dimension(format!(
            "data has {} columns but the matrices are {} x {}",
            data.p(),
            diff.dim(),
            diff.dim()
        )));
    }
    let forms: Vec<f64> = data.rows().map(|x| diff.quadratic_form(x)).collect();
    let l_star = pairwise_sum(&forms);
    if !l_star.is_finite() {
        return Err(Error::Domain("statistic is not finite".into()));
    }
    Ok(LrtValue {
        l_n: log_det_ratio + l_star / data.n() as f64,
        l_star,
        log_det_ratio,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{gen_identity, gen_uniform_random};

    #[test]
    fn g_examples() {
        let a = SymmetricMatrix::from_rows(&[vec![4.0]]).unwrap();
        let b = SymmetricMatrix::from_rows(&[vec![1.0]]).unwrap();
        assert!((g_matrix(&a, &b).unwrap().get(0, 0) - 0.75).abs() < 1e-15);

        let id = gen_identity::<f64>(5).unwrap();
        let r = gen_uniform_random::<f64>(5, 3).unwrap();
        let g = g_matrix(&id, &r).unwrap();
        let expected = id.sub(&r).unwrap();
        for (x, y) in g.as_slice().iter().zip(expected.as_slice()) {
            assert!((x - y).abs() < 1e-12);
        }
        let pd = SymmetricMatrix::from_upper_fn(5, |j, k| if j == k { 3.0 } else { r.get(j, k) * 0.5 }).unwrap();
        assert!(g_matrix(&pd, &pd).unwrap().max_abs() < 1e-12);
        assert!(matches!(g_matrix(&r, &id), Err(Error::NotPositiveDefinite { .. })));
    }

    #[test]
    fn statistic_by_hand() {
        let a = SymmetricMatrix::from_rows(&[vec![2.0]]).unwrap();
        let b = SymmetricMatrix::from_rows(&[vec![1.0]]).unwrap();
        let data = DataMatrix::new(2, 1, vec![1.0, -1.0]).unwrap();
        let v = lrt_statistic(&data, &a, &b).unwrap();
        assert!((v.l_star - 2.0).abs() < 1e-15);
        assert!((v.l_n - (1.0 - 2f64.ln())).abs() < 1e-15);

        let zero = data.scaled(0.0);
        let v = lrt_statistic(&zero, &a, &b).unwrap();
        assert_eq!(v.l_star, 0.0);
        assert!((v.l_n + 2f64.ln()).abs() < 1e-15);

        let same = lrt_statistic(&data, &a, &a).unwrap();
        assert_eq!((same.l_n, same.l_star), (0.0, 0.0));

        let wide = DataMatrix::new(1, 2, vec![1.0, 1.0]).unwrap();
        assert!(matches!(lrt_statistic(&wide, &a, &b), Err(Error::Dimension(_))));
    }
}
