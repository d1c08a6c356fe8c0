//! Seeded sampling of quadratic forms, empirical moments, the Rademacher
//! enumeration oracle and empirical Markov checks.

pub mod distribution;
pub mod moments;
pub mod quadrature;
pub mod rng;

pub use distribution::{analytic_profile, empirical_profile, ComponentDistribution};
pub use moments::{
    empirical_moment, exact_moment_rademacher, markov_tail_check, moment_of_values, read_stream,
    sample_quadform_deviations, write_stream, EmpiricalMoment, MarkovCheck, QuadformSampler,
    StreamHeader, BATCHES, DEFAULT_SAMPLES, EXACT_MAX_DIM,
};
pub use rng::{substream, Domain};
