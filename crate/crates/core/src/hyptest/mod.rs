//! Likelihood ratio tests for simple hypotheses on a precision matrix:
//! the statistic, Gaussian null percentiles, conservative regions and
//! data simulation.

pub mod data;
pub mod pair;
pub mod percentile;
pub mod region;
pub mod run;
pub mod simulate;
pub mod statistic;

pub use data::DataMatrix;
pub use pair::{HypothesisPair, Structure, PD_EPS};
pub use percentile::{
    chi_square_combination_draws, gaussian_null_percentile, order_statistic_index, percentile_from_weights,
    DEFAULT_DRAWS,
};
pub use region::{
    baseline_region_sparse, calibrate_cq, conservative_region_baseline, conservative_region_sparse,
    conservative_region_theorem1, conservative_threshold, moment_region, sparse_threshold, sum_deviation_samples,
    Calibration, CriticalRegion,
};
pub use run::{replicate, run_test, MethodKind, PreparedTest, ReplicationSummary, TestMethod, TestOutcome};
pub use simulate::{replicate_seed, simulate_observations, simulate_with_root};
pub use statistic::{g_matrix, log_det_ratio, lrt_statistic, LrtValue};
