use serde::ser::{SerializeMap, SerializeStruct};
use serde::{Serialize, Serializer};

use crate::scalar::{kahan_sum, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundMethod {
    Theorem1,
    BaiSilverstein,
    Corollary1,
    RosenthalSum,
    BurkholderDiag,
}

impl BoundMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Theorem1 => "theorem1",
            Self::BaiSilverstein => "bai_silverstein",
            Self::Corollary1 => "corollary1",
            Self::RosenthalSum => "rosenthal_sum",
            Self::BurkholderDiag => "burkholder_diag",
        }
    }
}

/// A nonnegative quantity carried both linearly and as a natural log, so
/// that bounds can fall back to log-space when the linear value overflows.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Quantity<T> {
    pub linear: T,
    pub ln: T,
}

impl<T: Real> Quantity<T> {
    pub fn new(x: T) -> Self {
        let x = x.abs();
        Self { linear: x, ln: x.ln() }
    }

    pub fn pow(self, e: T) -> Self {
        Self {
            linear: self.linear.powf(e),
            ln: if self.ln == T::neg_infinity() { self.ln } else { e * self.ln },
        }
    }

    pub fn mul(self, o: Self) -> Self {
        Self {
            linear: self.linear * o.linear,
            ln: self.ln + o.ln,
        }
    }

    /// `sum_i x_i^e`.
    pub fn power_sum(items: &[Self], e: T) -> Self {
        Self {
            linear: kahan_sum(items.iter().map(|x| x.linear.powf(e))),
            ln: log_sum_exp(items.iter().map(|x| e * x.ln)),
        }
    }

    fn linear_ok(&self) -> bool {
        self.linear.is_finite() && self.linear <= T::overflow_threshold()
    }
}

pub(crate) fn log_sum_exp<T: Real>(logs: impl Iterator<Item = T> + Clone) -> T {
    let top = logs.clone().fold(T::neg_infinity(), T::max);
    if top == T::neg_infinity() || !top.is_finite() {
        return top;
    }
    top + kahan_sum(logs.map(|l| (l - top).exp())).ln()
}

/// Named, nonnegative terms of a moment bound and their sum, with the
/// generic constant `cq` kept separate.
///
/// When `log_scale` is set every term and the total are natural logs.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundBreakdown<T> {
    pub method: BoundMethod,
    pub terms: Vec<(String, T)>,
    pub structural_total: T,
    pub cq: T,
    pub log_scale: bool,
}

impl<T: Real> BoundBreakdown<T> {
    pub(crate) fn from_quantities(method: BoundMethod, terms: Vec<(&str, Quantity<T>)>) -> Self {
        let linear_total = kahan_sum(terms.iter().map(|(_, q)| q.linear));
        let linear =
            terms.iter().all(|(_, q)| q.linear_ok()) && linear_total.is_finite() && linear_total <= T::overflow_threshold();
        if linear {
            Self {
                method,
                terms: terms.iter().map(|(n, q)| (n.to_string(), q.linear)).collect(),
                structural_total: linear_total,
                cq: T::one(),
                log_scale: false,
            }
        } else {
            Self {
                method,
                structural_total: log_sum_exp(terms.iter().map(|(_, q)| q.ln)),
                terms: terms.into_iter().map(|(n, q)| (n.to_string(), q.ln)).collect(),
                cq: T::one(),
                log_scale: true,
            }
        }
    }

    pub fn with_cq(mut self, cq: T) -> Self {
        self.cq = cq;
        self
    }

    pub fn term(&self, name: &str) -> Option<T> {
        self.terms.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }

    pub fn term_values(&self) -> Vec<T> {
        self.terms.iter().map(|(_, v)| *v).collect()
    }

    /// `ln(structural_total)` regardless of the reporting scale.
    pub fn ln_total(&self) -> T {
        if self.log_scale {
            self.structural_total
        } else {
            self.structural_total.ln()
        }
    }

    /// `cq * structural_total` (as a log when `log_scale`).
    pub fn value(&self) -> T {
        if self.log_scale {
            self.cq.ln() + self.structural_total
        } else {
            self.cq * self.structural_total
        }
    }
}

struct Terms<'a, T>(&'a [(String, T)]);

impl<T: Real> Serialize for Terms<'_, T> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (name, v) in self.0 {
            map.serialize_entry(name, &v.to_f64_lossy())?;
        }
        map.end()
    }
}

impl<T: Real> Serialize for BoundBreakdown<T> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("BoundBreakdown", 5)?;
        st.serialize_field("method", self.method.as_str())?;
        st.serialize_field("terms", &Terms(&self.terms))?;
        st.serialize_field("structural_total", &self.structural_total.to_f64_lossy())?;
        st.serialize_field("cq", &self.cq.to_f64_lossy())?;
        st.serialize_field("log_scale", &self.log_scale)?;
        st.end()
    }
}
