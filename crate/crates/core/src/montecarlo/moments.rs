use std::io::{BufRead, Write};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::linalg::io::fmt17;
use crate::linalg::SymmetricMatrix;
use crate::montecarlo::distribution::ComponentDistribution;
use crate::montecarlo::rng::{substream, Domain};
use crate::scalar::pairwise_sum;

/// Number of batches behind the batch-means standard error.
pub const BATCHES: usize = 32;

/// Largest dimension accepted by the Rademacher enumeration oracle.
pub const EXACT_MAX_DIM: usize = 20;

pub const DEFAULT_SAMPLES: usize = 200_000;

/// Monte Carlo estimate of `E|x^T A x - tr(A)|^q`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmpiricalMoment {
    pub estimate: f64,
    pub std_error: f64,
    pub n_samples: usize,
    pub seed: u64,
    pub q: f64,
}

/// Draws of `x^T A x - tr(A)` for `x` with iid components from `dist`.
pub struct QuadformSampler<'a> {
    a: &'a SymmetricMatrix<f64>,
    trace: f64,
    dist: ComponentDistribution,
    seed: u64,
}

impl<'a> QuadformSampler<'a> {
    pub fn new(a: &'a SymmetricMatrix<f64>, dist: ComponentDistribution, seed: u64) -> Result<Self> {
        dist.validate()?;
        Ok(Self {
            a,
            trace: a.trace(),
            dist,
            seed,
        })
    }

    /// Deviation for sample `index`; `buf` is scratch space of length `p`.
    pub fn deviation(&self, index: u64, buf: &mut Vec<f64>) -> f64 {
        let mut rng = substream(self.seed, Domain::QuadForm, index);
        buf.clear();
        buf.extend((0..self.a.dim()).map(|_| self.dist.sample(&mut rng)));
        self.a.quadratic_form(buf) - self.trace
    }

    /// Serial iterator over samples `0, 1, 2, ...`.
    pub fn iter(&self) -> impl Iterator<Item = f64> + '_ {
        let mut buf = Vec::with_capacity(self.a.dim());
        (0u64..).map(move |i| self.deviation(i, &mut buf))
    }

    /// Samples `0..n` computed in parallel, in index order.
    pub fn collect(&self, n: usize) -> Vec<f64> {
        (0..n as u64)
            .into_par_iter()
            .map_init(|| Vec::with_capacity(self.a.dim()), |buf, i| self.deviation(i, buf))
            .collect()
    }
}

pub fn sample_quadform_deviations(
    a: &SymmetricMatrix<f64>,
    dist: &ComponentDistribution,
    n_samples: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    Ok(QuadformSampler::new(a, *dist, seed)?.collect(n_samples))
}

pub fn empirical_moment(
    a: &SymmetricMatrix<f64>,
    dist: &ComponentDistribution,
    q: f64,
    n_samples: usize,
    seed: u64,
) -> Result<EmpiricalMoment> {
    if !(q > 0.0) {
        return Err(domain(format!("q must be positive, got {q}")));
    }
    if n_samples < BATCHES {
        return Err(Error::TooFewSamples {
            required: BATCHES,
            got: n_samples,
        });
    }
    dist.require_moments(q)?;
    let values = sample_quadform_deviations(a, dist, n_samples, seed)?;
    moment_of_values(&values, q, seed)
}

/// `(1/N) sum |v_i|^q` with a batch-means standard error over
/// [`BATCHES`] equal consecutive batches.
pub fn moment_of_values(values: &[f64], q: f64, seed: u64) -> Result<EmpiricalMoment> {
    let n = values.len();
    if n < BATCHES {
        return Err(Error::TooFewSamples {
            required: BATCHES,
            got: n,
        });
    }
    let powered: Vec<f64> = values.iter().map(|v| v.abs().powf(q)).collect();
    let estimate = pairwise_sum(&powered) / n as f64;
    let size = n / BATCHES;
    let means: Vec<f64> = powered[..size * BATCHES]
        .chunks_exact(size)
        .map(|c| pairwise_sum(c) / size as f64)
        .collect();
    let grand = pairwise_sum(&means) / BATCHES as f64;
    let var = means.iter().map(|m| (m - grand).powi(2)).sum::<f64>() / (BATCHES - 1) as f64;
    if !estimate.is_finite() {
        return Err(domain("empirical moment overflowed"));
    }
    Ok(EmpiricalMoment {
        estimate,
        std_error: (var / BATCHES as f64).sqrt(),
        n_samples: n,
        seed,
        q,
    })
}

/// Exact `E|x^T A x - tr(A)|^q` for Rademacher `x`, by enumerating all
/// `2^p` sign vectors.
pub fn exact_moment_rademacher(a: &SymmetricMatrix<f64>, q: f64) -> Result<f64> {
    let p = a.dim();
    if p > EXACT_MAX_DIM {
        return Err(Error::SizeLimit {
            requested: p,
            cap: EXACT_MAX_DIM,
        });
    }
    if !(q > 0.0) {
        return Err(domain(format!("q must be positive, got {q}")));
    }
    let trace = a.trace();
    let count = 1usize << p;
    let values: Vec<f64> = (0..count)
        .into_par_iter()
        .map_init(
            || vec![0.0; p],
            |x, mask| {
                for (j, xj) in x.iter_mut().enumerate() {
                    *xj = if mask >> j & 1 == 1 { -1.0 } else { 1.0 };
                }
                (a.quadratic_form(x) - trace).abs().powf(q)
            },
        )
        .collect();
    Ok(pairwise_sum(&values) / count as f64)
}

/// Markov's inequality on the empirical measure of a sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MarkovCheck {
    pub r: f64,
    pub q: f64,
    /// `#{|v_i| >= r} / N`.
    pub tail_fraction: f64,
    /// `(1/N) sum |v_i|^q / r^q`.
    pub moment_over_rq: f64,
    pub holds: bool,
}

/// Evaluates both sides of Markov's inequality at threshold `r`.
///
/// Each term is computed as `(|v|/r)^q`, which is at least one whenever
/// `|v| >= r` under IEEE rounding, so the inequality holds exactly in
/// floating point.
pub fn markov_tail_check(values: &[f64], q: f64, r: f64) -> Result<MarkovCheck> {
    if !(r > 0.0) || !(q > 0.0) {
        return Err(domain("markov check needs r > 0 and q > 0"));
    }
    let n = values.len().max(1) as f64;
    let mut count = 0usize;
    let mut sum = 0.0;
    for v in values {
        let ratio = v.abs() / r;
        if v.abs() >= r {
            count += 1;
        }
        sum += ratio.powf(q);
    }
    let tail_fraction = count as f64 / n;
    let moment_over_rq = sum / n;
    Ok(MarkovCheck {
        r,
        q,
        tail_fraction,
        moment_over_rq,
        holds: tail_fraction <= moment_over_rq,
    })
}

/// Header line of a stream dump.
#[derive(Debug, Clone, PartialEq)]
pub struct StreamHeader {
    pub seed: u64,
    pub dist: String,
    pub p: usize,
    pub q: f64,
}

/// Writes one value per line with a `# seed=... dist=... p=... q=...` header.
pub fn write_stream(values: &[f64], header: &StreamHeader, mut w: impl Write) -> Result<()> {
    writeln!(
        w,
        "# seed={} dist={} p={} q={}",
        header.seed, header.dist, header.p, header.q
    )?;
    for v in values {
        writeln!(w, "{}", fmt17(*v))?;
    }
    Ok(())
}

pub fn read_stream(reader: impl BufRead) -> Result<(StreamHeader, Vec<f64>)> {
    let mut lines = reader.lines().enumerate();
    let (_, first) = lines.next().ok_or(Error::Parse {
        line: 1,
        msg: "empty stream".into(),
    })?;
    let first = first?;
    let body = first.strip_prefix("# ").ok_or(Error::Parse {
        line: 1,
        msg: "missing header".into(),
    })?;
    let mut header = StreamHeader {
        seed: 0,
        dist: String::new(),
        p: 0,
        q: 0.0,
    };
    let bad = |msg: &str| Error::Parse {
        line: 1,
        msg: msg.to_string(),
    };
    for kv in body.split_whitespace() {
        let (k, v) = kv.split_once('=').ok_or_else(|| bad("expected key=value"))?;
        match k {
            "seed" => header.seed = v.parse().map_err(|_| bad("bad seed"))?,
            "dist" => header.dist = v.to_string(),
            "p" => header.p = v.parse().map_err(|_| bad("bad p"))?,
            "q" => header.q = v.parse().map_err(|_| bad("bad q"))?,
            _ => return Err(bad("unknown header key")),
        }
    }
    let mut values = Vec::new();
    for (i, line) in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        values.push(line.trim().parse().map_err(|_| Error::Parse {
            line: i + 1,
            msg: format!("bad value {line:?}"),
        })?);
    }
    Ok((header, values))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{gen_identity, gen_uniform_random};

    #[test]
    fn rademacher_diagonal_is_exactly_zero() {
        let a = SymmetricMatrix::diagonal_from(&[1.0, -2.0, 0.5]).unwrap();
        let v = sample_quadform_deviations(&a, &ComponentDistribution::Rademacher, 100, 3).unwrap();
        assert!(v.iter().all(|&x| x == 0.0));
        let m = empirical_moment(&gen_identity(5).unwrap(), &ComponentDistribution::Rademacher, 4.0, 64, 1)
            .unwrap();
        assert_eq!((m.estimate, m.std_error), (0.0, 0.0));
    }

    #[test]
    fn off_diagonal_pair_is_constant() {
        let a = SymmetricMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let m = empirical_moment(&a, &ComponentDistribution::Rademacher, 4.0, 1000, 9).unwrap();
        assert_eq!(m.estimate, 16.0);
        assert_eq!(exact_moment_rademacher(&a, 4.0).unwrap(), 16.0);
    }

    #[test]
    fn exact_oracle_examples() {
        assert_eq!(exact_moment_rademacher(&gen_identity(6).unwrap(), 3.0).unwrap(), 0.0);
        let ones = crate::linalg::gen_ones(2).unwrap();
        assert_eq!(exact_moment_rademacher(&ones, 3.0).unwrap(), 8.0);
        let big = gen_identity::<f64>(21).unwrap();
        assert!(matches!(exact_moment_rademacher(&big, 3.0), Err(Error::SizeLimit { .. })));
    }

    #[test]
    fn chi_square_one_mean() {
        let a = gen_identity(1).unwrap();
        let n = 20_000;
        let v = sample_quadform_deviations(&a, &ComponentDistribution::Gaussian, n, 11).unwrap();
        let mean = v.iter().sum::<f64>() / n as f64;
        assert!(mean.abs() <= 4.0 * (2.0 / n as f64).sqrt());
    }

    #[test]
    fn serial_and_parallel_streams_match() {
        let a = gen_uniform_random(6, 2).unwrap();
        let s = QuadformSampler::new(&a, ComponentDistribution::StudentT { df: 9.0 }, 5).unwrap();
        let par = s.collect(500);
        let ser: Vec<f64> = s.iter().take(500).collect();
        assert_eq!(par, ser);
        assert_eq!(par, s.collect(500));
    }

    #[test]
    fn too_few_samples() {
        let a = gen_identity(2).unwrap();
        assert!(matches!(
            empirical_moment(&a, &ComponentDistribution::Gaussian, 2.0, 31, 0),
            Err(Error::TooFewSamples { required: 32, got: 31 })
        ));
    }

    #[test]
    fn markov_examples() {
        let c = markov_tail_check(&[0.0; 10], 4.0, 1.0).unwrap();
        assert_eq!((c.tail_fraction, c.moment_over_rq, c.holds), (0.0, 0.0, true));
        let c = markov_tail_check(&[2.0, 2.0], 4.0, 2.0).unwrap();
        assert_eq!((c.tail_fraction, c.moment_over_rq, c.holds), (1.0, 1.0, true));
        assert!(markov_tail_check(&[1.0], 4.0, 0.0).is_err());
    }

    #[test]
    fn stream_dump_roundtrip() {
        let header = StreamHeader {
            seed: 4,
            dist: "gaussian".into(),
            p: 3,
            q: 4.0,
        };
        let vals = vec![0.1, -2.5e-8, 1.0 / 3.0];
        let mut buf = Vec::new();
        write_stream(&vals, &header, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("# seed=4 dist=gaussian p=3 q=4\n"));
        let (h, v) = read_stream(buf.as_slice()).unwrap();
        assert_eq!(h, header);
        assert_eq!(v, vals);
    }
}
