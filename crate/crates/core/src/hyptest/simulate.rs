use rand::RngCore;
use rayon::prelude::*;

use crate::error::{domain, Result};
use crate::hyptest::data::DataMatrix;
use crate::hyptest::pair::PD_EPS;
use crate::linalg::{inverse_sqrt, SymmetricMatrix};
use crate::montecarlo::{substream, ComponentDistribution, Domain};

/// `n` rows `x_i = Omega^{-1/2} y_i`, `y_i` with iid components from `dist`.
pub fn simulate_observations(
    omega: &SymmetricMatrix<f64>,
    dist: &ComponentDistribution,
    n: usize,
    seed: u64,
) -> Result<DataMatrix> {
    let root = inverse_sqrt(omega, PD_EPS)?;
    simulate_with_root(&root, dist, n, seed)
}

/// Same as [`simulate_observations`] with `Omega^{-1/2}` already computed.
pub fn simulate_with_root(
    root: &SymmetricMatrix<f64>,
    dist: &ComponentDistribution,
    n: usize,
    seed: u64,
) -> Result<DataMatrix> {
    dist.validate()?;
    if n == 0 {
        return Err(domain("n must be at least 1"));
    }
    let p = root.dim();
    let rows: Vec<Vec<f64>> = (0..n as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = substream(seed, Domain::Observations, i);
            let y: Vec<f64> = (0..p).map(|_| dist.sample(&mut rng)).collect();
            root.mul_vec(&y)
        })
        .collect();
    DataMatrix::new(n, p, rows.concat())
}

/// Data seed of replicate `index` in a replication study under `seed`.
pub fn replicate_seed(seed: u64, index: u64) -> u64 {
    substream(seed, Domain::Replicate, index).next_u64()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{gen_identity, SymmetricMatrix};

    #[test]
    fn identity_precision_returns_raw_draws() {
        let id = gen_identity::<f64>(3).unwrap();
        let d = simulate_observations(&id, &ComponentDistribution::Rademacher, 5, 2).unwrap();
        assert!(d.rows().flatten().all(|v| v.abs() == 1.0));
        let again = simulate_observations(&id, &ComponentDistribution::Rademacher, 5, 2).unwrap();
        assert_eq!(d, again);
        let other = simulate_observations(&id, &ComponentDistribution::Rademacher, 5, 3).unwrap();
        assert_ne!(d, other);
    }

    #[test]
    fn sample_covariance_matches_inverse_precision() {
        let omega = SymmetricMatrix::from_rows(&[
            vec![2.0, 0.5, 0.0],
            vec![0.5, 1.0, 0.2],
            vec![0.0, 0.2, 1.5],
        ])
        .unwrap();
        let n = 100_000;
        let d = simulate_observations(&omega, &ComponentDistribution::Gaussian, n, 9).unwrap();
        let s = d.second_moment();
        let tol = 5.0 * (3.0 / n as f64).sqrt();
        let inv = inverse_of(&omega);
        for j in 0..3 {
            for k in 0..3 {
                assert!((s[j * 3 + k] - inv[j][k]).abs() <= tol, "{j} {k}");
            }
        }
    }

    fn inverse_of(m: &SymmetricMatrix<f64>) -> [[f64; 3]; 3] {
        let a = |j: usize, k: usize| m.get(j, k);
        let det = a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) - a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0))
            + a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
        let mut out = [[0.0; 3]; 3];
        for j in 0..3 {
            for k in 0..3 {
                let (r0, r1) = ((k + 1) % 3, (k + 2) % 3);
                let (c0, c1) = ((j + 1) % 3, (j + 2) % 3);
                out[j][k] = (a(r0, c0) * a(r1, c1) - a(r0, c1) * a(r1, c0)) / det;
            }
        }
        out
    }
}
