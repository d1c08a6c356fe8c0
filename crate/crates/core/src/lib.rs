//! Moment bounds for quadratic forms `x^T A x` with independent
//! components, the matrix computations behind them, Monte Carlo checks,
//! and likelihood ratio tests for precision matrices.
//!
//! The linear algebra and bound code is generic over [`Real`] (`f32` or
//! `f64`); sampling and testing work in `f64`. The aliases below name the
//! common `f64` instantiations.

pub mod bounds;
pub mod error;
pub mod hyptest;
pub mod linalg;
pub mod montecarlo;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Real;

pub use bounds::{
    bai_silverstein_bound, burkholder_diag_bound, compare_bounds, corollary1_bound, rosenthal_sum_bound,
    structural_ratio, theorem1_bound, BoundComparison, BoundMethod, CorollaryBound, ProfileSource,
};
pub use hyptest::{DataMatrix, HypothesisPair, TestMethod, TestOutcome};
pub use linalg::{EigenMethod, SparseClass};
pub use montecarlo::ComponentDistribution;

pub type Matrix = linalg::SymmetricMatrix<f64>;
pub type Matrix32 = linalg::SymmetricMatrix<f32>;
pub type Profile = bounds::MomentProfile<f64>;
pub type Profile32 = bounds::MomentProfile<f32>;
pub type Breakdown = bounds::BoundBreakdown<f64>;
pub type Spectrum = linalg::SpectralSummary<f64>;
