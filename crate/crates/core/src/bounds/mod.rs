//! Closed-form moment bounds for `E|x^T A x - tr(A)|^q`.
//!
//! Every bound is reported as a [`BoundBreakdown`]: the individual
//! structural terms with the unspecified generic constant factored out
//! (`cq = 1` unless the caller supplies one). Comparisons between bounds
//! are made through ratios of structural totals, where the constant
//! cancels.

mod breakdown;
mod profile;

pub use breakdown::{BoundBreakdown, BoundMethod};
pub use profile::{MomentProfile, ProfileSource};

use serde::Serialize;

use breakdown::Quantity;

use crate::error::{domain, Result};
use crate::linalg::{singular_values, SpectralSummary, SymmetricMatrix};
use crate::scalar::Real;

/// Four-term structural bound:
///
/// ```text
/// T1 = kappa_2q^2q (sum_j a_jj^2)^{q/2}
/// T2 = kappa_2q^2q (sum_{j != k} |a_jk|^2q)^{1/2}
/// T3 = (kappa_2 kappa_2q)^q [sum_k (sum_{j != k} a_jk^2)^q]^{1/2}
/// T4 = kappa_2^q |s|_4^q
/// ```
///
/// where `s` are the singular values of `A`.
pub fn theorem1_bound<T: Real>(a: &SymmetricMatrix<T>, prof: &MomentProfile<T>) -> Result<BoundBreakdown<T>> {
    prof.require_q_above_two()?;
    let spectrum = singular_values(a)?;
    Ok(theorem1_with_spectrum(a, &spectrum, prof))
}

/// [`theorem1_bound`] with a precomputed spectrum.
pub fn theorem1_with_spectrum<T: Real>(
    a: &SymmetricMatrix<T>,
    spectrum: &SpectralSummary<T>,
    prof: &MomentProfile<T>,
) -> BoundBreakdown<T> {
    let p = a.dim();
    let q = prof.q;
    let two = T::lit(2.0);
    let half = T::lit(0.5);

    let diag: Vec<Quantity<T>> = (0..p).map(|j| Quantity::new(a.get(j, j))).collect();
    // off-diagonal magnitudes, row-major
    let off: Vec<Quantity<T>> = (0..p)
        .flat_map(|j| (0..p).filter(move |&k| k != j).map(move |k| (j, k)))
        .map(|(j, k)| Quantity::new(a.get(j, k)))
        .collect();
    // column sums of squares excluding the diagonal
    let col_sq: Vec<Quantity<T>> = (0..p)
        .map(|k| {
            let col: Vec<Quantity<T>> = (0..p)
                .filter(|&j| j != k)
                .map(|j| Quantity::new(a.get(j, k)))
                .collect();
            Quantity::power_sum(&col, two)
        })
        .collect();

    let k2q_2q = Quantity::new(prof.kappa2q).pow(two * q);
    let t1 = k2q_2q.mul(Quantity::power_sum(&diag, two).pow(q / two));
    let t2 = k2q_2q.mul(Quantity::power_sum(&off, two * q).pow(half));
    let t3 = Quantity::new(prof.kappa2 * prof.kappa2q)
        .pow(q)
        .mul(Quantity::power_sum(&col_sq, q).pow(half));
    let s4 = Quantity {
        linear: spectrum.power_sum(T::lit(4.0)),
        ln: spectrum.ln_power_sum(T::lit(4.0)),
    };
    let t4 = Quantity::new(prof.kappa2).pow(q).mul(s4.pow(q / T::lit(4.0)));

    BoundBreakdown::from_quantities(
        BoundMethod::Theorem1,
        vec![
            ("diagonal", t1),
            ("offdiagonal_entries", t2),
            ("offdiagonal_rows", t3),
            ("spectral", t4),
        ],
    )
}

/// Baseline bound in Schatten form: `kappa_4^2q |A|_F^q + kappa_2q^2q |s|_q^q`.
pub fn bai_silverstein_bound<T: Real>(
    a: &SymmetricMatrix<T>,
    prof: &MomentProfile<T>,
) -> Result<BoundBreakdown<T>> {
    prof.require_q_above_two()?;
    let spectrum = singular_values(a)?;
    Ok(bai_silverstein_with_spectrum(a, &spectrum, prof))
}

pub fn bai_silverstein_with_spectrum<T: Real>(
    a: &SymmetricMatrix<T>,
    spectrum: &SpectralSummary<T>,
    prof: &MomentProfile<T>,
) -> BoundBreakdown<T> {
    let q = prof.q;
    let two = T::lit(2.0);
    let entries: Vec<Quantity<T>> = a.as_slice().iter().map(|&v| Quantity::new(v)).collect();
    let s1 = Quantity::new(prof.kappa4)
        .pow(two * q)
        .mul(Quantity::power_sum(&entries, two).pow(q / two));
    let sq = Quantity {
        linear: spectrum.power_sum(q),
        ln: spectrum.ln_power_sum(q),
    };
    let s2 = Quantity::new(prof.kappa2q).pow(two * q).mul(sq);
    BoundBreakdown::from_quantities(BoundMethod::BaiSilverstein, vec![("frobenius", s1), ("schatten_q", s2)])
}

/// Bound over the sparse class, in two forms.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorollaryBound<T: Real> {
    /// `p^{q/2} + p^{1/2} M_p^{q/2}`, constants set to one.
    pub scaling: BoundBreakdown<T>,
    /// Term-by-term upper estimates of the four structural terms for any
    /// member of the class, with `C0` and `r` tracked and unit moments.
    pub tracked: BoundBreakdown<T>,
}

pub fn corollary1_bound<T: Real>(p: usize, q: T, r: T, m_p: T, c0: T) -> Result<CorollaryBound<T>> {
    if p == 0 {
        return Err(domain("p must be at least 1"));
    }
    if !(q > T::lit(2.0)) {
        return Err(domain(format!("q must exceed 2, got {q}")));
    }
    if !(r >= T::zero() && r < T::one()) {
        return Err(domain(format!("r must lie in [0, 1), got {r}")));
    }
    if !(m_p > T::zero()) || !(c0 > T::zero()) {
        return Err(domain("M_p and C0 must be positive"));
    }
    let two = T::lit(2.0);
    let half = T::lit(0.5);
    let pq = Quantity::new(T::from_usize(p).unwrap_or_else(T::infinity));
    let mq = Quantity::new(m_p);
    let cq = Quantity::new(c0);

    let scaling = BoundBreakdown::from_quantities(
        BoundMethod::Corollary1,
        vec![
            ("dimension", pq.pow(q / two)),
            ("sparsity", pq.pow(half).mul(mq.pow(q / two))),
        ],
    );
    let tracked = BoundBreakdown::from_quantities(
        BoundMethod::Corollary1,
        vec![
            ("diagonal", cq.pow(q).mul(pq.pow(q / two))),
            (
                "offdiagonal_entries",
                cq.pow(q - r / two).mul(pq.pow(half)).mul(mq.pow(half)),
            ),
            (
                "offdiagonal_rows",
                cq.pow(q * (T::one() - r / two)).mul(pq.pow(half)).mul(mq.pow(q / two)),
            ),
            // |s|_4^q <= (p C0^4)^{q/4}
            ("spectral", cq.pow(q).mul(pq.pow(q / T::lit(4.0)))),
        ],
    );
    Ok(CorollaryBound { scaling, tracked })
}

/// Rosenthal-type bound for a sum of `n` iid mean-zero variables:
/// `C^q [q^q n mu_q + q^{q/2} (n sigma2)^{q/2}]`, reported with `cq = C^q`.
pub fn rosenthal_sum_bound<T: Real>(n: usize, q: T, mu_q: T, sigma2: T, c: T) -> Result<BoundBreakdown<T>> {
    if !(q > T::lit(2.0)) {
        return Err(domain(format!("q must exceed 2, got {q}")));
    }
    if !(mu_q >= T::zero()) || !(sigma2 >= T::zero()) || !(c >= T::zero()) {
        return Err(domain("moments and the numeric constant must be nonnegative"));
    }
    let nq = Quantity::new(T::from_usize(n).unwrap_or_else(T::infinity));
    let qq = Quantity::new(q);
    let moment = qq.pow(q).mul(nq).mul(Quantity::new(mu_q));
    let variance = qq.pow(q / T::lit(2.0)).mul(nq.mul(Quantity::new(sigma2)).pow(q / T::lit(2.0)));
    Ok(
        BoundBreakdown::from_quantities(BoundMethod::RosenthalSum, vec![("moment_sum", moment), ("variance", variance)])
            .with_cq(c.powf(q)),
    )
}

/// Diagonal-part bound in q-th moment form:
/// `((q - 1) nu_q^2 sum_j a_jj^2)^{q/2}`.
pub fn burkholder_diag_bound<T: Real>(diag: &[T], prof: &MomentProfile<T>) -> Result<BoundBreakdown<T>> {
    prof.require_q_above_two()?;
    let q = prof.q;
    let two = T::lit(2.0);
    let d: Vec<Quantity<T>> = diag.iter().map(|&v| Quantity::new(v)).collect();
    let inner = Quantity::new(q - T::one())
        .mul(Quantity::new(prof.nu_q).pow(two))
        .mul(Quantity::power_sum(&d, two));
    Ok(BoundBreakdown::from_quantities(
        BoundMethod::BurkholderDiag,
        vec![("diagonal", inner.pow(q / two))],
    ))
}

/// Both general bounds for one matrix and the ratio of their structural
/// totals.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundComparison<T: Real> {
    pub theorem1: BoundBreakdown<T>,
    pub bai_silverstein: BoundBreakdown<T>,
    /// `theorem1 / bai_silverstein`; `1` when both vanish.
    #[serde(serialize_with = "ser_real")]
    pub ratio: T,
}

fn ser_real<T: Real, S: serde::Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(v.to_f64_lossy())
}

pub fn compare_bounds<T: Real>(a: &SymmetricMatrix<T>, prof: &MomentProfile<T>) -> Result<BoundComparison<T>> {
    prof.require_q_above_two()?;
    let spectrum = singular_values(a)?;
    let theorem1 = theorem1_with_spectrum(a, &spectrum, prof);
    let bai_silverstein = bai_silverstein_with_spectrum(a, &spectrum, prof);
    let ratio = structural_ratio(&theorem1, &bai_silverstein);
    Ok(BoundComparison {
        theorem1,
        bai_silverstein,
        ratio,
    })
}

/// Ratio of structural totals, robust to log-scale reporting.
pub fn structural_ratio<T: Real>(num: &BoundBreakdown<T>, den: &BoundBreakdown<T>) -> T {
    let (ln_n, ln_d) = (num.ln_total(), den.ln_total());
    match (ln_n == T::neg_infinity(), ln_d == T::neg_infinity()) {
        (true, true) => T::one(),
        (false, true) => T::infinity(),
        _ if !num.log_scale && !den.log_scale => num.structural_total / den.structural_total,
        _ => (ln_n - ln_d).exp(),
    }
}
