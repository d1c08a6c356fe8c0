use serde::Serialize;

use crate::error::{domain, Result};
use crate::scalar::Real;

/// Where the moment constants of a profile came from.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileSource {
    /// Closed forms or quadrature for a named distribution.
    Analytic(String),
    /// Sample moments over `n_samples` draws.
    Empirical { n_samples: usize },
    /// Constants supplied directly.
    Given,
}

/// Moment constants of a component distribution: `kappa_w = (E|X|^w)^{1/w}`
/// at `w = 2, 4, 2q`, and `nu_q = ||X^2 - 1||_q`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentProfile<T> {
    pub q: T,
    pub kappa2: T,
    pub kappa4: T,
    pub kappa2q: T,
    pub nu_q: T,
    pub source: ProfileSource,
}

impl<T: Real> MomentProfile<T> {
    pub fn new(q: T, kappa2: T, kappa4: T, kappa2q: T, nu_q: T) -> Result<Self> {
        let p = Self {
            q,
            kappa2,
            kappa4,
            kappa2q,
            nu_q,
            source: ProfileSource::Given,
        };
        p.validate()?;
        Ok(p)
    }

    /// All `kappa_w = 1` and `nu_q = 0`, the Rademacher constants. Bounds
    /// evaluated with this profile are the purely matrix-dependent parts.
    pub fn unit(q: T) -> Result<Self> {
        Self::new(q, T::one(), T::one(), T::one(), T::zero())
    }

    pub fn with_source(mut self, source: ProfileSource) -> Self {
        self.source = source;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.q > T::zero()) || !self.q.is_finite() {
            return Err(domain(format!("q must be positive and finite, got {}", self.q)));
        }
        for (name, v) in [
            ("kappa2", self.kappa2),
            ("kappa4", self.kappa4),
            ("kappa2q", self.kappa2q),
            ("nu_q", self.nu_q),
        ] {
            if !(v >= T::zero()) || !v.is_finite() {
                return Err(domain(format!("{name} must be finite and nonnegative, got {v}")));
            }
        }
        Ok(())
    }

    /// Lyapunov ordering `kappa2 <= kappa4 <= kappa2q` (for `q > 2`), up to
    /// a relative slack.
    pub fn is_monotone(&self, rel_tol: T) -> bool {
        let slack = T::one() + rel_tol;
        self.kappa2 <= self.kappa4 * slack && self.kappa4 <= self.kappa2q * slack
    }

    pub(crate) fn require_q_above_two(&self) -> Result<()> {
        self.validate()?;
        if !(self.q > T::lit(2.0)) {
            return Err(domain(format!("bounds need q > 2, got {}", self.q)));
        }
        Ok(())
    }
}
