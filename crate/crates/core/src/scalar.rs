//! Scalar abstraction shared by the linear-algebra and bound code.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Real floating-point scalar: `f32` or `f64`.
///
/// Numerical tolerances depend on the precision of the type, so each
/// implementation carries its own.
pub trait Real:
    Float + FromPrimitive + ToPrimitive + Debug + Display + Default + Sum + Send + Sync + 'static
{
    /// Relative tolerance used when validating symmetry of input matrices.
    fn symmetry_tol() -> Self;

    /// Relative off-diagonal mass at which Jacobi sweeps stop.
    fn jacobi_tol() -> Self;

    /// Magnitude above which bounds switch to log-space reporting.
    fn overflow_threshold() -> Self;

    /// Lossy conversion from an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f64 {
    fn symmetry_tol() -> Self {
        1e-12
    }
    fn jacobi_tol() -> Self {
        1e-12
    }
    fn overflow_threshold() -> Self {
        1e300
    }
}

impl Real for f32 {
    fn symmetry_tol() -> Self {
        1e-5
    }
    fn jacobi_tol() -> Self {
        1e-6
    }
    fn overflow_threshold() -> Self {
        1e36
    }
}

/// Kahan-compensated accumulator. Summation order is whatever order the
/// caller feeds values in, so fixed iteration order gives bit-stable totals.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum<T> {
    sum: T,
    comp: T,
}

impl<T: Real> KahanSum<T> {
    pub fn new() -> Self {
        Self {
            sum: T::zero(),
            comp: T::zero(),
        }
    }

    #[inline]
    pub fn add(&mut self, x: T) {
        let y = x - self.comp;
        let t = self.sum + y;
        self.comp = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn total(&self) -> T {
        self.sum
    }
}

/// Compensated sum over an iterator, in iteration order.
pub fn kahan_sum<T: Real, I: IntoIterator<Item = T>>(values: I) -> T {
    let mut acc = KahanSum::new();
    for v in values {
        acc.add(v);
    }
    acc.total()
}

/// Pairwise (tree) summation. The split points depend only on the slice
/// length, so the result does not depend on how the values were produced.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const LEAF: usize = 16;
    if values.len() <= LEAF {
        return values.iter().fold(0.0, |acc, &v| acc + v);
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kahan_recovers_small_terms() {
        let mut v = vec![1.0e16_f64];
        v.extend(std::iter::repeat_n(1.0, 1000));
        assert_eq!(kahan_sum(v.iter().copied()), 1.0e16 + 1000.0);
    }

    #[test]
    fn pairwise_matches_exact_integers() {
        let v: Vec<f64> = (1..=1000).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&v), 500_500.0);
        assert_eq!(pairwise_sum(&[]), 0.0);
    }

    #[test]
    fn tolerances_by_precision() {
        assert!(f64::symmetry_tol() < f32::symmetry_tol() as f64);
        assert_eq!(f32::lit(0.5), 0.5);
    }
}
