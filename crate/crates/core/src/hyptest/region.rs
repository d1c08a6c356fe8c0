use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::{bai_silverstein_bound, theorem1_bound, BoundBreakdown, MomentProfile};
use crate::error::{domain, Result};
use crate::hyptest::percentile::check_alpha;
use crate::linalg::SymmetricMatrix;
use crate::montecarlo::{moment_of_values, substream, ComponentDistribution, Domain, EmpiricalMoment};
use crate::scalar::pairwise_sum;

/// Lower end of a one-sided rejection region `(critical_value, inf)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CriticalRegion {
    pub critical_value: f64,
    /// `n tr(G)`, the null mean of `L*_n`.
    pub center: f64,
    /// `critical_value - center`.
    pub excess: f64,
    /// The moment bound vanished, so the region starts at the null mean.
    pub degenerate: bool,
}

impl CriticalRegion {
    fn new(center: f64, excess: f64) -> Self {
        Self {
            critical_value: center + excess,
            center,
            excess,
            degenerate: excess == 0.0,
        }
    }
}

fn check_q(q: f64) -> Result<()> {
    if q > 2.0 && q.is_finite() {
        Ok(())
    } else {
        Err(domain(format!("q must exceed 2, got {q}")))
    }
}

fn check_n(n: usize) -> Result<f64> {
    if n == 0 {
        return Err(domain("n must be at least 1"));
    }
    Ok(n as f64)
}

/// `n tr(G) + n^{1/2} (cq U_p / alpha)^{1/q}`.
pub fn conservative_threshold(n: usize, trace_g: f64, u_p: f64, q: f64, alpha: f64, cq: f64) -> Result<CriticalRegion> {
    check_q(q)?;
    check_alpha(alpha)?;
    let nf = check_n(n)?;
    if !(u_p >= 0.0) || !(cq >= 0.0) {
        return Err(domain("U_p and cq must be nonnegative"));
    }
    Ok(CriticalRegion::new(nf * trace_g, nf.sqrt() * (cq * u_p / alpha).powf(1.0 / q)))
}

/// Same threshold with `U_p` given as a bound breakdown, which may be on
/// the log scale.
fn threshold_from_breakdown(
    n: usize,
    trace_g: f64,
    bound: &BoundBreakdown<f64>,
    q: f64,
    alpha: f64,
    cq: f64,
) -> Result<CriticalRegion> {
    if !bound.log_scale {
        return conservative_threshold(n, trace_g, bound.structural_total, q, alpha, cq);
    }
    check_q(q)?;
    check_alpha(alpha)?;
    let nf = check_n(n)?;
    let ln_excess = 0.5 * nf.ln() + (cq.ln() + bound.structural_total - alpha.ln()) / q;
    Ok(CriticalRegion::new(nf * trace_g, ln_excess.exp()))
}

/// Conservative region from the four-term bound on `G`; `prof` describes
/// the components of `y` and fixes `q`.
pub fn conservative_region_theorem1(
    g: &SymmetricMatrix<f64>,
    n: usize,
    prof: &MomentProfile<f64>,
    alpha: f64,
    cq: f64,
) -> Result<CriticalRegion> {
    let bound = theorem1_bound(g, prof)?;
    threshold_from_breakdown(n, g.trace(), &bound, prof.q, alpha, cq)
}

/// The same construction with the two-term baseline bound in place of the
/// four-term one.
pub fn conservative_region_baseline(
    g: &SymmetricMatrix<f64>,
    n: usize,
    prof: &MomentProfile<f64>,
    alpha: f64,
    cq: f64,
) -> Result<CriticalRegion> {
    let bound = bai_silverstein_bound(g, prof)?;
    threshold_from_breakdown(n, g.trace(), &bound, prof.q, alpha, cq)
}

fn check_sparse(p: usize, m_p: f64, cq: f64) -> Result<()> {
    if p == 0 {
        return Err(domain("p must be at least 1"));
    }
    if !(m_p >= 0.0) || !m_p.is_finite() || !(cq >= 0.0) {
        return Err(domain("M_p and cq must be finite and nonnegative"));
    }
    Ok(())
}

/// `n tr(G) + n^{1/2} (p^{1/2} + p^{1/(2q)} M_p^{1/2}) (cq / alpha)^{1/q}`.
pub fn sparse_threshold(n: usize, trace_g: f64, p: usize, q: f64, m_p: f64, alpha: f64, cq: f64) -> Result<CriticalRegion> {
    check_q(q)?;
    check_alpha(alpha)?;
    check_sparse(p, m_p, cq)?;
    let nf = check_n(n)?;
    let pf = p as f64;
    let scale = pf.sqrt() + pf.powf(1.0 / (2.0 * q)) * m_p.sqrt();
    Ok(CriticalRegion::new(nf * trace_g, nf.sqrt() * scale * (cq / alpha).powf(1.0 / q)))
}

pub fn conservative_region_sparse(
    g: &SymmetricMatrix<f64>,
    n: usize,
    q: f64,
    m_p: f64,
    alpha: f64,
    cq: f64,
) -> Result<CriticalRegion> {
    sparse_threshold(n, g.trace(), g.dim(), q, m_p, alpha, cq)
}

/// Region implied by the two-term baseline over the sparse class:
/// `n tr(G) + (n p M_p)^{1/2} (cq / alpha)^{1/q}`.
pub fn baseline_region_sparse(n: usize, trace_g: f64, p: usize, q: f64, m_p: f64, alpha: f64, cq: f64) -> Result<CriticalRegion> {
    check_q(q)?;
    check_alpha(alpha)?;
    check_sparse(p, m_p, cq)?;
    let nf = check_n(n)?;
    Ok(CriticalRegion::new(
        nf * trace_g,
        (nf * p as f64 * m_p).sqrt() * (cq / alpha).powf(1.0 / q),
    ))
}

/// `n tr(G) + (M / alpha)^{1/q}` with `M` a q-th moment of
/// `sum_i (y_i^T G y_i - tr G)`.
pub fn moment_region(n: usize, trace_g: f64, moment: f64, q: f64, alpha: f64) -> Result<CriticalRegion> {
    check_alpha(alpha)?;
    let nf = check_n(n)?;
    if !(q > 0.0) || !(moment >= 0.0) {
        return Err(domain("moment region needs q > 0 and a nonnegative moment"));
    }
    Ok(CriticalRegion::new(nf * trace_g, (moment / alpha).powf(1.0 / q)))
}

/// Draws of `sum_{i<n} (y_i^T G y_i - tr G)`, replicate `j` from its own
/// substream.
pub fn sum_deviation_samples(
    g: &SymmetricMatrix<f64>,
    dist: &ComponentDistribution,
    n: usize,
    n_sims: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    dist.validate()?;
    check_n(n)?;
    let p = g.dim();
    let tr = g.trace();
    Ok((0..n_sims as u64)
        .into_par_iter()
        .map_init(
            || (Vec::with_capacity(p), Vec::with_capacity(n)),
            |(y, terms), j| {
                let mut rng = substream(seed, Domain::Calibration, j);
                terms.clear();
                for _ in 0..n {
                    y.clear();
                    y.extend((0..p).map(|_| dist.sample(&mut rng)));
                    terms.push(g.quadratic_form(y) - tr);
                }
                pairwise_sum(terms)
            },
        )
        .collect())
}

/// Constant `cq` that makes `n^{q/2} cq U_p` equal to a simulated q-th
/// moment of the centered statistic.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Calibration {
    pub moment: EmpiricalMoment,
    pub u_p: f64,
    pub cq: f64,
}

pub fn calibrate_cq(
    g: &SymmetricMatrix<f64>,
    n: usize,
    prof: &MomentProfile<f64>,
    dist: &ComponentDistribution,
    n_sims: usize,
    seed: u64,
) -> Result<Calibration> {
    let q = prof.q;
    check_q(q)?;
    dist.require_moments(q)?;
    let bound = theorem1_bound(g, prof)?;
    let values = sum_deviation_samples(g, dist, n, n_sims, seed)?;
    let moment = moment_of_values(&values, q, seed)?;
    let ln_u = bound.ln_total();
    let cq = if ln_u == f64::NEG_INFINITY {
        1.0
    } else {
        (moment.estimate.ln() - 0.5 * q * (n as f64).ln() - ln_u).exp()
    };
    Ok(Calibration {
        u_p: if bound.log_scale { ln_u.exp() } else { bound.structural_total },
        moment,
        cq,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::gen_zero;
    use crate::montecarlo::markov_tail_check;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn hand_examples() {
        let r = conservative_threshold(100, 5.0, 1000.0, 4.0, 0.05, 1.0).unwrap();
        let expected = 500.0 + 10.0 * 20000f64.powf(0.25);
        assert!(rel(r.critical_value, expected) < 1e-12);
        assert!((r.critical_value - 618.92).abs() < 0.01);

        let r = conservative_threshold(49, 0.5, 1.0, 3.0, 1.0 - 1e-15, 1.0).unwrap();
        assert!((r.critical_value - (24.5 + 7.0)).abs() < 1e-9);

        let s = sparse_threshold(100, 0.0, 100, 4.0, 4.0, 0.05, 1.0).unwrap();
        let b = baseline_region_sparse(100, 0.0, 100, 4.0, 4.0, 0.05, 1.0).unwrap();
        let f = 20f64.powf(0.25);
        assert!(rel(s.critical_value, 10.0 * (10.0 + 2.0 * 100f64.powf(0.125)) * f) < 1e-12);
        assert!(rel(b.critical_value, 200.0 * f) < 1e-12);
        assert!((s.critical_value - 286.7).abs() < 0.05);
        assert!((b.critical_value - 422.9).abs() < 0.05);

        let c = sparse_threshold(64, 0.0, 1, 4.0, 0.0, 0.05, 1.0).unwrap();
        assert!(rel(c.critical_value, 8.0 * f) < 1e-12);
    }

    #[test]
    fn zero_g_is_degenerate() {
        let g = gen_zero::<f64>(6).unwrap();
        let prof = MomentProfile::unit(4.0).unwrap();
        let r = conservative_region_theorem1(&g, 30, &prof, 0.05, 1.0).unwrap();
        assert_eq!(r.critical_value, 0.0);
        assert!(r.degenerate);
    }

    #[test]
    fn domains() {
        assert!(conservative_threshold(10, 0.0, 1.0, 2.0, 0.05, 1.0).is_err());
        assert!(conservative_threshold(10, 0.0, 1.0, 4.0, 0.0, 1.0).is_err());
        assert!(conservative_threshold(0, 0.0, 1.0, 4.0, 0.5, 1.0).is_err());
        assert!(sparse_threshold(10, 0.0, 4, 4.0, -1.0, 0.5, 1.0).is_err());
    }

    #[test]
    fn calibrated_region_controls_the_calibration_sample() {
        let g = SymmetricMatrix::diagonal_from(&[0.5, 0.25, -0.1]).unwrap();
        let prof = MomentProfile::unit(4.0).unwrap();
        let dist = ComponentDistribution::Gaussian;
        let cal = calibrate_cq(&g, 20, &prof, &dist, 4000, 11).unwrap();
        let region = conservative_threshold(20, g.trace(), cal.u_p, 4.0, 0.05, cal.cq).unwrap();
        let direct = moment_region(20, g.trace(), cal.moment.estimate, 4.0, 0.05).unwrap();
        assert!(rel(region.critical_value, direct.critical_value) < 1e-9);

        let values = sum_deviation_samples(&g, &dist, 20, 4000, 11).unwrap();
        let check = markov_tail_check(&values, 4.0, direct.excess).unwrap();
        assert!(check.holds);
        assert!(check.tail_fraction <= 0.05);
    }
}
