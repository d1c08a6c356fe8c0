use crate::error::{Error, Result};
use crate::linalg::matrix::SymmetricMatrix;
use crate::linalg::spectral::spectral_radius;
use crate::scalar::{kahan_sum, Real};

/// Parameters of the class `{A symmetric : rho(A) <= c0, max_k sum_j |a_jk|^r <= m_p}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SparseClass {
    pub r: f64,
    pub m_p: f64,
    pub c0: f64,
}

impl SparseClass {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.r) {
            return Err(Error::Domain(format!("r must lie in [0, 1), got {}", self.r)));
        }
        if !(self.c0 > 0.0) {
            return Err(Error::Domain(format!("C0 must be positive, got {}", self.c0)));
        }
        if self.m_p.is_nan() || self.m_p < 0.0 {
            return Err(Error::Domain(format!("M_p must be nonnegative, got {}", self.m_p)));
        }
        Ok(())
    }
}

/// Outcome of a membership check, with the quantities that decided it.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassMembership {
    pub member: bool,
    pub spectral_radius: f64,
    /// `max_k sum_j |a_jk|^r`.
    pub max_column_budget: f64,
    /// First column whose budget exceeds `m_p`.
    pub violating_column: Option<usize>,
    /// `rho(A) - c0` when positive.
    pub spectral_excess: Option<f64>,
}

/// `|a|^r` with the counting convention `|a|^0 = 1` for `a != 0`, `0` otherwise.
pub fn abs_pow(a: f64, r: f64) -> f64 {
    if a == 0.0 {
        0.0
    } else if r == 0.0 {
        1.0
    } else {
        a.abs().powf(r)
    }
}

/// `sum_j |a_jk|^r` for every column `k`, in row order.
pub fn column_budgets<T: Real>(a: &SymmetricMatrix<T>, r: f64) -> Vec<f64> {
    let p = a.dim();
    (0..p)
        .map(|k| kahan_sum((0..p).map(|j| abs_pow(a.get(j, k).to_f64_lossy(), r))))
        .collect()
}

pub fn is_in_sparse_class<T: Real>(a: &SymmetricMatrix<T>, class: &SparseClass) -> Result<ClassMembership> {
    class.validate()?;
    let budgets = column_budgets(a, class.r);
    let max_column_budget = budgets.iter().copied().fold(0.0, f64::max);
    let violating_column = budgets.iter().position(|&b| b > class.m_p);
    let rho = spectral_radius(a)?.to_f64_lossy();
    let spectral_excess = (rho > class.c0).then_some(rho - class.c0);
    Ok(ClassMembership {
        member: violating_column.is_none() && spectral_excess.is_none(),
        spectral_radius: rho,
        max_column_budget,
        violating_column,
        spectral_excess,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::generators::{gen_identity, gen_ones};

    fn class(r: f64, m_p: f64, c0: f64) -> SparseClass {
        SparseClass { r, m_p, c0 }
    }

    #[test]
    fn identity_is_member() {
        let id = gen_identity::<f64>(6).unwrap();
        assert!(is_in_sparse_class(&id, &class(0.5, 1.0, 1.0)).unwrap().member);
        assert!(is_in_sparse_class(&id, &class(0.0, 1.0, 1.0)).unwrap().member);
    }

    #[test]
    fn ones_fails_on_spectrum() {
        let out = is_in_sparse_class(&gen_ones::<f64>(4).unwrap(), &class(0.5, 4.0, 1.0)).unwrap();
        assert!(!out.member);
        assert!((out.spectral_radius - 4.0).abs() < 1e-12);
        assert!((out.spectral_excess.unwrap() - 3.0).abs() < 1e-12);
        assert_eq!(out.violating_column, None);
        assert_eq!(out.max_column_budget, 4.0);
    }

    #[test]
    fn column_budget_witness() {
        let out = is_in_sparse_class(&gen_ones::<f64>(4).unwrap(), &class(0.5, 3.0, 10.0)).unwrap();
        assert!(!out.member);
        assert_eq!(out.violating_column, Some(0));
        assert_eq!(out.spectral_excess, None);
    }

    #[test]
    fn counting_convention() {
        assert_eq!(abs_pow(0.0, 0.0), 0.0);
        assert_eq!(abs_pow(-0.3, 0.0), 1.0);
        assert_eq!(abs_pow(0.25, 0.5), 0.5);
    }

    #[test]
    fn rejects_bad_parameters() {
        let id = gen_identity::<f64>(2).unwrap();
        assert!(is_in_sparse_class(&id, &class(1.0, 1.0, 1.0)).is_err());
        assert!(is_in_sparse_class(&id, &class(0.5, 1.0, 0.0)).is_err());
    }
}
