use rand_distr::{Distribution, Gamma};
use rayon::prelude::*;

use crate::error::{domain, Result};
use crate::linalg::{eigenvalues, SymmetricMatrix};
use crate::montecarlo::{substream, Domain};

pub const DEFAULT_DRAWS: usize = 200_000;

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(domain(format!("alpha must lie in (0, 1), got {alpha}")))
    }
}

/// 1-based index of the `(1 - alpha)` order statistic among `n` draws.
pub fn order_statistic_index(n: usize, alpha: f64) -> usize {
    (((1.0 - alpha) * n as f64).ceil() as usize).clamp(1, n)
}

/// Draws of `sum_j d_j chi2_j(n)`, replicate `i` from its own substream.
pub fn chi_square_combination_draws(weights: &[f64], n: usize, n_draws: usize, seed: u64) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(domain("n must be at least 1"));
    }
    let weights: Vec<f64> = weights.iter().copied().filter(|d| *d != 0.0).collect();
    if weights.is_empty() {
        return Ok(vec![0.0; n_draws]);
    }
    let chi2 = Gamma::new(n as f64 / 2.0, 2.0).map_err(|e| domain(e.to_string()))?;
    Ok((0..n_draws as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = substream(seed, Domain::ChiSquare, i);
            weights.iter().map(|d| d * chi2.sample(&mut rng)).sum()
        })
        .collect())
}

/// Empirical `(1 - alpha)` quantile of `sum_j d_j chi2_j(n)` with `d_j` the
/// eigenvalues of `G`: the null distribution of `L*_n` for Gaussian data.
pub fn gaussian_null_percentile(g: &SymmetricMatrix<f64>, n: usize, alpha: f64, n_draws: usize, seed: u64) -> Result<f64> {
    check_alpha(alpha)?;
    if n_draws == 0 {
        return Err(domain("need at least one draw"));
    }
    let d = eigenvalues(g)?;
    percentile_from_weights(&d, n, alpha, n_draws, seed)
}

pub fn percentile_from_weights(weights: &[f64], n: usize, alpha: f64, n_draws: usize, seed: u64) -> Result<f64> {
    check_alpha(alpha)?;
    if n_draws == 0 {
        return Err(domain("need at least one draw"));
    }
    let mut draws = chi_square_combination_draws(weights, n, n_draws, seed)?;
    let k = order_statistic_index(n_draws, alpha) - 1;
    let (_, v, _) = draws.select_nth_unstable_by(k, f64::total_cmp);
    Ok(*v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::gen_zero;

    #[test]
    fn order_index() {
        assert_eq!(order_statistic_index(100, 0.05), 95);
        assert_eq!(order_statistic_index(1000, 0.05), 950);
        assert_eq!(order_statistic_index(3, 0.05), 3);
        assert_eq!(order_statistic_index(10, 0.999), 1);
    }

    #[test]
    fn zero_g_gives_zero() {
        let g = gen_zero::<f64>(4).unwrap();
        assert_eq!(gaussian_null_percentile(&g, 10, 0.05, 100, 1).unwrap(), 0.0);
    }

    #[test]
    fn deterministic_and_alpha_checked() {
        let a = percentile_from_weights(&[2.0, 1.0], 3, 0.1, 5000, 4).unwrap();
        let b = percentile_from_weights(&[2.0, 1.0], 3, 0.1, 5000, 4).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
        assert!(percentile_from_weights(&[1.0], 3, 1.0, 10, 0).is_err());
        assert!(percentile_from_weights(&[1.0], 3, 0.0, 10, 0).is_err());
    }
}
