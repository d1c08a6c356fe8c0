use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal, StudentT};
use serde::{Serialize, Serializer};
use statrs::function::gamma::ln_gamma;

use crate::bounds::{MomentProfile, ProfileSource};
use crate::error::{domain, Error, Result};
use crate::montecarlo::quadrature::{integrate, integrate_line, integrate_upper_tail, WINDOW};

/// Law of the iid vector components, standardized to mean 0 and variance 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ComponentDistribution {
    Gaussian,
    Rademacher,
    /// Student t with `df` degrees of freedom, divided by `sqrt(df / (df - 2))`.
    StudentT { df: f64 },
    /// `E - 1` with `E ~ Exp(1)`.
    CenteredExponential,
    /// Uniform on `[-sqrt 3, sqrt 3]`.
    UniformStandardized,
}

/// Required margin of `df` over `2q` for Student t components.
pub const STUDENT_T_DF_MARGIN: f64 = 0.5;

impl ComponentDistribution {
    pub fn tag(&self) -> &'static str {
        match self {
            Self::Gaussian => "gaussian",
            Self::Rademacher => "rademacher",
            Self::StudentT { .. } => "student_t",
            Self::CenteredExponential => "centered_exponential",
            Self::UniformStandardized => "uniform_standardized",
        }
    }

    /// Checks that the law is standardizable at all.
    pub fn validate(&self) -> Result<()> {
        if let Self::StudentT { df } = *self {
            if !(df > 2.0) || !df.is_finite() {
                return Err(Error::InsufficientMoments(format!(
                    "student_t needs df > 2 for unit variance, got {df}"
                )));
            }
        }
        Ok(())
    }

    /// Checks that `E|X|^{2q}` is finite (with the Student t margin).
    pub fn require_moments(&self, q: f64) -> Result<()> {
        self.validate()?;
        if let Self::StudentT { df } = *self {
            if df < 2.0 * q + STUDENT_T_DF_MARGIN {
                return Err(Error::InsufficientMoments(format!(
                    "student_t needs df >= 2q + {STUDENT_T_DF_MARGIN} = {}, got {df}",
                    2.0 * q + STUDENT_T_DF_MARGIN
                )));
            }
        }
        Ok(())
    }

    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            Self::Gaussian => StandardNormal.sample(rng),
            Self::Rademacher => {
                if rng.random_bool(0.5) {
                    1.0
                } else {
                    -1.0
                }
            }
            Self::StudentT { df } => {
                let t: f64 = StudentT::new(df).expect("validated df").sample(rng);
                t / (df / (df - 2.0)).sqrt()
            }
            Self::CenteredExponential => {
                let e: f64 = Exp1.sample(rng);
                e - 1.0
            }
            Self::UniformStandardized => {
                let s = 3f64.sqrt();
                rng.random_range(-s..s)
            }
        }
    }

    /// Density of the standardized law (not defined for Rademacher).
    fn density(&self, x: f64) -> f64 {
        match *self {
            Self::Gaussian => (-0.5 * x * x).exp() / (2.0 * PI).sqrt(),
            Self::Rademacher => f64::NAN,
            Self::StudentT { df } => {
                let s = (df / (df - 2.0)).sqrt();
                let t = s * x;
                let ln_c = ln_gamma((df + 1.0) / 2.0) - ln_gamma(df / 2.0) - 0.5 * (df * PI).ln();
                s * (ln_c - (df + 1.0) / 2.0 * (t * t / df).ln_1p()).exp()
            }
            Self::CenteredExponential => {
                if x < -1.0 {
                    0.0
                } else {
                    (-(x + 1.0)).exp()
                }
            }
            Self::UniformStandardized => {
                let s = 3f64.sqrt();
                if x.abs() <= s {
                    0.5 / s
                } else {
                    0.0
                }
            }
        }
    }

    /// `E g(X)` by quadrature. `breaks` are interior points where `g`
    /// is not smooth.
    pub fn expect(&self, g: impl Fn(f64) -> f64, breaks: &[f64]) -> f64 {
        let f = |x: f64| {
            let d = self.density(x);
            if d == 0.0 {
                0.0
            } else {
                g(x) * d
            }
        };
        match *self {
            Self::Rademacher => 0.5 * (g(1.0) + g(-1.0)),
            Self::Gaussian | Self::StudentT { .. } => integrate_line(f, breaks, WINDOW),
            Self::CenteredExponential => {
                let mut pts = vec![-1.0];
                pts.extend(breaks.iter().copied().filter(|&b| b > -1.0 && b < WINDOW));
                pts.push(WINDOW);
                pts.windows(2).map(|w| integrate(f, w[0], w[1])).sum::<f64>() + integrate_upper_tail(f, WINDOW)
            }
            Self::UniformStandardized => {
                let s = 3f64.sqrt();
                let mut pts = vec![-s];
                pts.extend(breaks.iter().copied().filter(|b| b.abs() < s));
                pts.push(s);
                pts.windows(2).map(|w| integrate(f, w[0], w[1])).sum()
            }
        }
    }

    /// `E|X|^w`, closed form where one exists.
    pub fn abs_moment(&self, w: f64) -> Result<f64> {
        if !(w > 0.0) {
            return Err(domain(format!("moment order must be positive, got {w}")));
        }
        self.validate()?;
        Ok(match *self {
            Self::Gaussian => (0.5 * w * 2f64.ln() + ln_gamma((w + 1.0) / 2.0) - 0.5 * PI.ln()).exp(),
            Self::Rademacher => 1.0,
            Self::StudentT { df } => {
                if w >= df {
                    return Err(Error::InsufficientMoments(format!(
                        "E|X|^{w} is infinite for student_t({df})"
                    )));
                }
                (0.5 * w * (df - 2.0).ln() + ln_gamma((w + 1.0) / 2.0) + ln_gamma((df - w) / 2.0)
                    - 0.5 * PI.ln()
                    - ln_gamma(df / 2.0))
                .exp()
            }
            Self::UniformStandardized => 3f64.powf(w / 2.0) / (w + 1.0),
            Self::CenteredExponential => self.expect(|x| x.abs().powf(w), &[0.0]),
        })
    }

    /// `nu_q = (E|X^2 - 1|^q)^{1/q}`.
    pub fn nu(&self, q: f64) -> Result<f64> {
        self.require_moments(q)?;
        if let Self::Rademacher = self {
            return Ok(0.0);
        }
        Ok(self
            .expect(|x| (x * x - 1.0).abs().powf(q), &[-1.0, 0.0, 1.0])
            .powf(1.0 / q))
    }
}

impl fmt::Display for ComponentDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::StudentT { df } => write!(f, "student_t({df})"),
            other => f.write_str(other.tag()),
        }
    }
}

impl Serialize for ComponentDistribution {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl FromStr for ComponentDistribution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let dist = match s {
            "gaussian" | "normal" => Self::Gaussian,
            "rademacher" => Self::Rademacher,
            "centered_exponential" | "exponential" => Self::CenteredExponential,
            "uniform_standardized" | "uniform" => Self::UniformStandardized,
            _ => {
                let df = s
                    .strip_prefix("student_t(")
                    .and_then(|r| r.strip_suffix(')'))
                    .or_else(|| s.strip_prefix("student_t:"))
                    .ok_or_else(|| domain(format!("unknown distribution {s:?}")))?;
                let df: f64 = df
                    .parse()
                    .map_err(|_| domain(format!("bad degrees of freedom in {s:?}")))?;
                Self::StudentT { df }
            }
        };
        dist.validate()?;
        Ok(dist)
    }
}

/// Moment constants of `dist` at order `q`.
pub fn analytic_profile(dist: &ComponentDistribution, q: f64) -> Result<MomentProfile<f64>> {
    dist.require_moments(q)?;
    let kappa = |w: f64| -> Result<f64> { Ok(dist.abs_moment(w)?.powf(1.0 / w)) };
    Ok(
        MomentProfile::new(q, kappa(2.0)?, kappa(4.0)?, kappa(2.0 * q)?, dist.nu(q)?)?
            .with_source(ProfileSource::Analytic(dist.to_string())),
    )
}

/// Moment constants estimated from iid draws of one component.
pub fn empirical_profile(samples: &[f64], q: f64) -> Result<MomentProfile<f64>> {
    if samples.is_empty() {
        return Err(Error::TooFewSamples { required: 1, got: 0 });
    }
    let n = samples.len() as f64;
    let kappa = |w: f64| (samples.iter().map(|x| x.abs().powf(w)).sum::<f64>() / n).powf(1.0 / w);
    let nu = (samples.iter().map(|x| (x * x - 1.0).abs().powf(q)).sum::<f64>() / n).powf(1.0 / q);
    Ok(MomentProfile::new(q, kappa(2.0), kappa(4.0), kappa(2.0 * q), nu)?.with_source(
        ProfileSource::Empirical {
            n_samples: samples.len(),
        },
    ))
}
