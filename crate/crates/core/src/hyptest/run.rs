use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::MomentProfile;
use crate::error::{domain, Error, Result};
use crate::hyptest::data::DataMatrix;
use crate::hyptest::pair::{HypothesisPair, Structure};
use crate::hyptest::percentile::{check_alpha, gaussian_null_percentile};
use crate::hyptest::region::{conservative_region_theorem1, conservative_region_sparse, CriticalRegion};
use crate::hyptest::simulate::{replicate_seed, simulate_with_root};
use crate::hyptest::statistic::{g_matrix, log_det_ratio, lrt_with};
use crate::linalg::{inverse_sqrt, SymmetricMatrix};
use crate::montecarlo::ComponentDistribution;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodKind {
    GaussianMcPercentile,
    ConservativeTheorem1,
    ConservativeCorollary1,
}

impl MethodKind {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::GaussianMcPercentile => "gaussian_mc_percentile",
            Self::ConservativeTheorem1 => "conservative_theorem1",
            Self::ConservativeCorollary1 => "conservative_corollary1",
        }
    }
}

/// How the critical value is obtained.
#[derive(Debug, Clone, PartialEq)]
pub enum TestMethod {
    /// Monte Carlo quantile of the Gaussian null law of `L*_n`.
    GaussianMcPercentile { n_draws: usize, seed: u64 },
    /// Markov region from the four-term bound on `G`.
    ConservativeTheorem1 { profile: MomentProfile<f64>, cq: f64 },
    /// Markov region over the sparse class of the pair.
    ConservativeCorollary1 { q: f64, cq: f64 },
}

impl TestMethod {
    pub fn kind(&self) -> MethodKind {
        match self {
            Self::GaussianMcPercentile { .. } => MethodKind::GaussianMcPercentile,
            Self::ConservativeTheorem1 { .. } => MethodKind::ConservativeTheorem1,
            Self::ConservativeCorollary1 { .. } => MethodKind::ConservativeCorollary1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TestOutcome {
    pub l_n: f64,
    pub l_star: f64,
    pub critical_value: f64,
    pub alpha: f64,
    pub reject: bool,
    pub method: MethodKind,
}

/// A test with `G`, the log-det term and the critical value fixed for a
/// given sample size, ready to be applied to many data sets.
#[derive(Debug, Clone)]
pub struct PreparedTest {
    pair: HypothesisPair,
    diff: SymmetricMatrix<f64>,
    g: SymmetricMatrix<f64>,
    log_det_ratio: f64,
    region: CriticalRegion,
    n: usize,
    alpha: f64,
    method: MethodKind,
}

impl PreparedTest {
    pub fn new(pair: &HypothesisPair, method: &TestMethod, n: usize, alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        if n == 0 {
            return Err(domain("n must be at least 1"));
        }
        let g = g_matrix(pair.null(), pair.alt())?;
        let region = match method {
            TestMethod::GaussianMcPercentile { n_draws, seed } => {
                let v = gaussian_null_percentile(&g, n, alpha, *n_draws, *seed)?;
                CriticalRegion {
                    critical_value: v,
                    center: n as f64 * g.trace(),
                    excess: v - n as f64 * g.trace(),
                    degenerate: v == 0.0 && g.is_zero(),
                }
            }
            TestMethod::ConservativeTheorem1 { profile, cq } => conservative_region_theorem1(&g, n, profile, alpha, *cq)?,
            TestMethod::ConservativeCorollary1 { q, cq } => match pair.structure() {
                Structure::Sparse { m_p, .. } => conservative_region_sparse(&g, n, *q, m_p, alpha, *cq)?,
                Structure::BlockDiagonal { .. } => {
                    return Err(domain("conservative_corollary1 needs a sparse hypothesis pair"));
                }
            },
        };
        Ok(Self {
            pair: pair.clone(),
            diff: pair.null().sub(pair.alt())?,
            log_det_ratio: log_det_ratio(pair.null(), pair.alt())?,
            g,
            region,
            n,
            alpha,
            method: method.kind(),
        })
    }

    pub fn g(&self) -> &SymmetricMatrix<f64> {
        &self.g
    }

    pub fn region(&self) -> CriticalRegion {
        self.region
    }

    pub fn pair(&self) -> &HypothesisPair {
        &self.pair
    }

    pub fn evaluate(&self, data: &DataMatrix) -> Result<TestOutcome> {
        if data.n() != self.n {
            return Err(Error::Dimension(format!(
                "test was prepared for n = {}, data has {} rows",
                self.n,
                data.n()
            )));
        }
        let v = lrt_with(data, &self.diff, self.log_det_ratio)?;
        Ok(TestOutcome {
            l_n: v.l_n,
            l_star: v.l_star,
            critical_value: self.region.critical_value,
            alpha: self.alpha,
            reject: v.l_star > self.region.critical_value,
            method: self.method,
        })
    }
}

pub fn run_test(data: &DataMatrix, pair: &HypothesisPair, method: &TestMethod, alpha: f64) -> Result<TestOutcome> {
    if data.p() != pair.dim() {
        return Err(Error::Dimension(format!(
            "data has {} columns, hypotheses are {} x {}",
            data.p(),
            pair.dim(),
            pair.dim()
        )));
    }
    PreparedTest::new(pair, method, data.n(), alpha)?.evaluate(data)
}

/// Result of applying one prepared test to simulated data sets.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReplicationSummary {
    pub replications: usize,
    pub rejections: usize,
    pub rejection_rate: f64,
    /// Binomial standard error at the observed rate.
    pub std_error: f64,
    pub mean_l_star: f64,
    pub critical_value: f64,
}

/// Simulates `replications` data sets under the null (or the alternative)
/// and applies `test` to each; replicate `i` uses data seed
/// [`replicate_seed`]`(seed, i)`.
pub fn replicate(
    test: &PreparedTest,
    dist: &ComponentDistribution,
    replications: usize,
    seed: u64,
    under_alternative: bool,
) -> Result<ReplicationSummary> {
    if replications == 0 {
        return Err(domain("need at least one replication"));
    }
    let root = inverse_sqrt(test.pair.truth(under_alternative), crate::hyptest::pair::PD_EPS)?;
    let outcomes: Vec<TestOutcome> = (0..replications as u64)
        .into_par_iter()
        .map(|i| {
            let data = simulate_with_root(&root, dist, test.n, replicate_seed(seed, i))?;
            test.evaluate(&data)
        })
        .collect::<Result<_>>()?;
    let rejections = outcomes.iter().filter(|o| o.reject).count();
    let rate = rejections as f64 / replications as f64;
    let l_stars: Vec<f64> = outcomes.iter().map(|o| o.l_star).collect();
    Ok(ReplicationSummary {
        replications,
        rejections,
        rejection_rate: rate,
        std_error: (rate * (1.0 - rate) / replications as f64).sqrt(),
        mean_l_star: crate::scalar::pairwise_sum(&l_stars) / replications as f64,
        critical_value: test.region.critical_value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyptest::simulate::simulate_observations;
    use crate::linalg::gen_identity;

    #[test]
    fn outcome_json_keys() {
        let o = TestOutcome {
            l_n: 1.0,
            l_star: 2.0,
            critical_value: 3.0,
            alpha: 0.05,
            reject: false,
            method: MethodKind::ConservativeTheorem1,
        };
        assert_eq!(
            serde_json::to_string(&o).unwrap(),
            r#"{"l_n":1.0,"l_star":2.0,"critical_value":3.0,"alpha":0.05,"reject":false,"method":"conservative_theorem1"}"#
        );
    }

    #[test]
    fn equal_hypotheses_never_reject() {
        let id = gen_identity::<f64>(4).unwrap();
        let pair = HypothesisPair::block_diagonal(id.clone(), id.clone(), 1, 4).unwrap();
        let data = simulate_observations(&id, &ComponentDistribution::Gaussian, 30, 1).unwrap();
        for method in [
            TestMethod::GaussianMcPercentile { n_draws: 1000, seed: 1 },
            TestMethod::ConservativeTheorem1 {
                profile: MomentProfile::unit(4.0).unwrap(),
                cq: 1.0,
            },
        ] {
            let o = run_test(&data, &pair, &method, 0.05).unwrap();
            assert_eq!(o.l_star, 0.0);
            assert!(!o.reject);
        }
    }

    #[test]
    fn corollary_method_needs_sparse_pair() {
        let pair = HypothesisPair::block_ones_vs_identity(1, 2).unwrap();
        let m = TestMethod::ConservativeCorollary1 { q: 4.0, cq: 1.0 };
        assert!(PreparedTest::new(&pair, &m, 10, 0.05).is_err());
        let sparse = HypothesisPair::sparse_generated(10, 0.5, 3.0, 2).unwrap();
        assert!(PreparedTest::new(&sparse, &m, 10, 0.05).is_ok());
    }

    #[test]
    fn mismatched_data_is_rejected() {
        let pair = HypothesisPair::block_ones_vs_identity(1, 2).unwrap();
        let data = DataMatrix::new(1, 3, vec![0.0; 3]).unwrap();
        let m = TestMethod::GaussianMcPercentile { n_draws: 10, seed: 0 };
        assert!(matches!(run_test(&data, &pair, &m, 0.05), Err(Error::Dimension(_))));
    }

    #[test]
    fn alternative_far_from_null_is_detected() {
        let pair = HypothesisPair::block_ones_vs_identity(2, 2).unwrap();
        let method = TestMethod::GaussianMcPercentile { n_draws: 20_000, seed: 3 };
        let test = PreparedTest::new(&pair, &method, 100, 0.05).unwrap();
        let s = replicate(&test, &ComponentDistribution::Gaussian, 50, 5, true).unwrap();
        assert_eq!(s.rejections, 50);
    }
}
