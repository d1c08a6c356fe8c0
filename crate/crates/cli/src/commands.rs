use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use qforma::bounds::{BoundBreakdown, MomentProfile};
use qforma::hyptest::{gaussian_null_percentile, run_test, simulate_observations, DataMatrix, HypothesisPair};
use qforma::linalg::io::read_matrix;
use qforma::linalg::{
    gen_block_ones, gen_block_ones_plus_identity, gen_identity, gen_ones, gen_sparse_member, gen_sparse_precision,
    gen_uniform_random, gen_zero, MAX_DIM,
};
use qforma::montecarlo::{
    analytic_profile, exact_moment_rademacher, markov_tail_check, moment_of_values, sample_quadform_deviations,
    write_stream, EmpiricalMoment, MarkovCheck, StreamHeader,
};
use qforma::{
    bai_silverstein_bound, burkholder_diag_bound, compare_bounds, corollary1_bound, rosenthal_sum_bound,
    theorem1_bound, ComponentDistribution, Matrix, SparseClass, TestMethod, TestOutcome,
};
use serde::Serialize;

use crate::config::{defaults, Settings};
use crate::error::{CliError, EXIT_REJECT};
use crate::output::{pairs, table, Report};

/// Largest dimension the Rademacher enumeration oracle is run at.
const ORACLE_MAX_DIM: usize = 12;
/// Allowed distance of the empirical moment from the oracle, in batch SEs.
const ORACLE_SE_MULT: f64 = 5.0;

fn open(path: &Path) -> Result<BufReader<File>, CliError> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| CliError::Input(format!("cannot open {}: {e}", path.display())))
}

fn load_matrix(path: &Path) -> Result<Matrix, CliError> {
    read_matrix(open(path)?).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn generate(family: &str, s: &Settings) -> Result<Matrix, CliError> {
    let m = match family {
        "identity" => gen_identity(s.p()?)?,
        "zero" => gen_zero(s.p()?)?,
        "ones" => gen_ones(s.p()?)?,
        "block" => gen_block_ones(s.m()?, s.k()?)?,
        "block-null" => {
            let m = s.m()?;
            if m % 2 != 0 {
                return Err(CliError::Domain(format!("block-null needs an even m, got {m}")));
            }
            gen_block_ones_plus_identity(m / 2, 2 * s.k()?)?
        }
        "sparse" => gen_sparse_member(s.p()?, s.r()?, s.mp()?, s.c0()?, s.seed()?)?,
        "sparse-precision" => gen_sparse_precision(s.p()?, s.r()?, s.mp()?, s.seed()?)?,
        "random" => gen_uniform_random(s.p()?, s.seed()?)?,
        other => return Err(CliError::Input(format!("unknown matrix family {other:?}"))),
    };
    Ok(m)
}

/// The matrix named by `--matrix` or `--gen`.
fn matrix(s: &Settings) -> Result<Matrix, CliError> {
    match (s.matrix()?, s.gen()?) {
        (Some(_), Some(_)) => Err(CliError::Input("give either --matrix or --gen, not both".into())),
        (Some(path), None) => load_matrix(&path),
        (None, Some(family)) => generate(&family, s),
        (None, None) => Err(CliError::Input("no matrix: pass --matrix FILE or --gen FAMILY".into())),
    }
}

fn fmt(v: f64) -> String {
    format!("{v}")
}

fn breakdown_table(b: &BoundBreakdown<f64>) -> String {
    let mut rows: Vec<(&str, String)> = vec![("method", b.method.as_str().to_string())];
    for (name, v) in &b.terms {
        rows.push((name.as_str(), fmt(*v)));
    }
    rows.push(("structural_total", fmt(b.structural_total)));
    rows.push(("cq", fmt(b.cq)));
    rows.push(("log_scale", b.log_scale.to_string()));
    pairs(&rows)
}

pub fn bound(s: &Settings) -> Result<Report, CliError> {
    let method = s.method()?.unwrap_or(defaults().bound_method);
    let q = s.q()?;
    let cq = s.cq()?;
    let dist = s.dist()?;
    let profile = || -> Result<MomentProfile<f64>, CliError> { Ok(analytic_profile(&dist, q)?) };
    let b = match method.as_str() {
        "theorem1" => theorem1_bound(&matrix(s)?, &profile()?)?,
        "bai_silverstein" => bai_silverstein_bound(&matrix(s)?, &profile()?)?,
        "burkholder_diag" => burkholder_diag_bound(&matrix(s)?.diagonal(), &profile()?)?,
        "corollary1" | "corollary1_scaling" => {
            let p = match (s.matrix()?, s.gen()?) {
                (None, None) => s.p()?,
                _ => matrix(s)?.dim(),
            };
            let c = corollary1_bound(p, q, s.r()?, s.mp()?, s.c0()?)?;
            if method == "corollary1" {
                c.tracked
            } else {
                c.scaling
            }
        }
        "rosenthal_sum" => {
            if !(cq >= 0.0) {
                return Err(CliError::Domain("cq must be nonnegative".into()));
            }
            let b = rosenthal_sum_bound(s.n()?, q, dist.abs_moment(q)?, 1.0, cq.powf(1.0 / q))?;
            return Report::new(&b, breakdown_table(&b));
        }
        other => {
            return Err(CliError::Input(format!(
                "unknown bound method {other:?}; use theorem1, bai_silverstein, corollary1, corollary1_scaling, \
                 rosenthal_sum or burkholder_diag"
            )))
        }
    };
    let b = b.with_cq(cq);
    Report::new(&b, breakdown_table(&b))
}

#[derive(Serialize)]
struct ScalingRow {
    p: usize,
    theorem1_total: f64,
    bs_total: f64,
    ratio: f64,
    log_scale: bool,
}

#[derive(Serialize)]
struct ScalingReport {
    family: String,
    q: f64,
    profile: String,
    rows: Vec<ScalingRow>,
    ratio_trend: &'static str,
}

fn trend(ratios: &[f64]) -> &'static str {
    let (lo, hi) = ratios
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &r| (lo.min(r), hi.max(r)));
    if ratios.len() < 2 || hi - lo <= 1e-9 * hi.abs() {
        "constant"
    } else if ratios.windows(2).all(|w| w[1] < w[0]) {
        "decreasing"
    } else if ratios.windows(2).all(|w| w[1] > w[0]) {
        "increasing"
    } else {
        "mixed"
    }
}

pub fn compare_scaling(s: &Settings) -> Result<Report, CliError> {
    let family = s.gen()?.unwrap_or_else(|| "block".into());
    let q = s.q()?;
    let grid = s.grid()?;
    if let Some(&p) = grid.iter().find(|&&p| p > MAX_DIM || p == 0) {
        return Err(CliError::Domain(format!("grid point {p} is outside 1..={MAX_DIM}")));
    }
    let (prof, profile_name) = match s.dist_opt()? {
        Some(d) => (analytic_profile(&d, q)?, d.to_string()),
        None => (MomentProfile::unit(q)?, "unit".to_string()),
    };
    let mut rows = Vec::new();
    for &p in &grid {
        let a = match family.as_str() {
            "identity" => gen_identity(p)?,
            "ones" => gen_ones(p)?,
            "block" => {
                let k = (p as f64).sqrt().round() as usize;
                if k * k != p {
                    return Err(CliError::Domain(format!("block family needs square p, got {p}")));
                }
                gen_block_ones(k, k)?
            }
            "sparse" => {
                let mp = s.mp_opt()?.unwrap_or((p as f64).sqrt()).max(1.0);
                gen_sparse_member(p, s.r()?, mp, s.c0()?, s.seed()?)?
            }
            other => {
                return Err(CliError::Input(format!(
                    "unknown scaling family {other:?}; use identity, ones, block or sparse"
                )))
            }
        };
        let c = compare_bounds(&a, &prof)?;
        rows.push(ScalingRow {
            p,
            theorem1_total: c.theorem1.structural_total,
            bs_total: c.bai_silverstein.structural_total,
            ratio: c.ratio,
            log_scale: c.theorem1.log_scale || c.bai_silverstein.log_scale,
        });
    }
    let ratios: Vec<f64> = rows.iter().map(|r| r.ratio).collect();
    let report = ScalingReport {
        family,
        q,
        profile: profile_name,
        ratio_trend: trend(&ratios),
        rows,
    };
    let body: Vec<Vec<String>> = report
        .rows
        .iter()
        .map(|r| vec![r.p.to_string(), fmt(r.theorem1_total), fmt(r.bs_total), fmt(r.ratio)])
        .collect();
    let text = format!(
        "{}ratio trend: {}\n",
        table(&["p", "theorem1_total", "bs_total", "ratio"], &body),
        report.ratio_trend
    );
    Report::new(&report, text)
}

#[derive(Serialize)]
struct VerifyReport {
    p: usize,
    q: f64,
    dist: ComponentDistribution,
    seed: u64,
    empirical: EmpiricalMoment,
    oracle: Option<f64>,
    oracle_gap_se: Option<f64>,
    theorem1: Option<BoundBreakdown<f64>>,
    bai_silverstein: Option<BoundBreakdown<f64>>,
    markov: Vec<MarkovCheck>,
    flags: Vec<String>,
    pass: bool,
}

pub fn verify(s: &Settings) -> Result<Report, CliError> {
    let a = matrix(s)?;
    let q = s.q()?;
    let dist = s.dist()?;
    let seed = s.seed()?;
    dist.require_moments(q)?;
    let values = sample_quadform_deviations(&a, &dist, s.samples()?, seed)?;
    let empirical = moment_of_values(&values, q, seed)?;
    if let Some(path) = s.dump()? {
        let header = StreamHeader {
            seed,
            dist: dist.to_string(),
            p: a.dim(),
            q,
        };
        let file = File::create(&path).map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))?;
        write_stream(&values, &header, std::io::BufWriter::new(file))?;
    }

    let mut flags = Vec::new();
    let (oracle, oracle_gap_se) = if dist == ComponentDistribution::Rademacher && a.dim() <= ORACLE_MAX_DIM {
        let exact = exact_moment_rademacher(&a, q)?;
        let gap = (empirical.estimate - exact).abs();
        let floor = 1e-12 * exact.abs();
        if gap > ORACLE_SE_MULT * empirical.std_error + floor {
            flags.push(format!("empirical moment is {gap:e} from the enumeration oracle"));
        }
        let z = if empirical.std_error > 0.0 { (gap - floor).max(0.0) / empirical.std_error } else { 0.0 };
        (Some(exact), Some(z))
    } else {
        (None, None)
    };

    let (theorem1, bai_silverstein) = if q > 2.0 {
        let c = compare_bounds(&a, &analytic_profile(&dist, q)?)?;
        (Some(c.theorem1.with_cq(s.cq()?)), Some(c.bai_silverstein.with_cq(s.cq()?)))
    } else {
        (None, None)
    };

    let mut abs: Vec<f64> = values.iter().map(|v| v.abs()).collect();
    abs.sort_by(f64::total_cmp);
    let mut thresholds: Vec<f64> = [0.5, 0.9, 0.99]
        .iter()
        .map(|f| abs[((abs.len() - 1) as f64 * f) as usize])
        .collect();
    if let Some(b) = &theorem1 {
        thresholds.push((b.ln_total() + b.cq.ln()).exp().powf(1.0 / q));
    }
    let mut markov = Vec::new();
    for r in thresholds.into_iter().filter(|r| *r > 0.0 && r.is_finite()) {
        let c = markov_tail_check(&values, q, r)?;
        if !c.holds {
            flags.push(format!("markov inequality fails at r = {r}"));
        }
        markov.push(c);
    }

    let report = VerifyReport {
        p: a.dim(),
        q,
        dist,
        seed,
        pass: flags.is_empty(),
        empirical,
        oracle,
        oracle_gap_se,
        theorem1,
        bai_silverstein,
        markov,
        flags,
    };
    let opt = |v: Option<f64>| v.map_or("-".to_string(), fmt);
    let mut rows = vec![
        ("p", report.p.to_string()),
        ("q", fmt(q)),
        ("dist", dist.to_string()),
        ("seed", seed.to_string()),
        ("samples", report.empirical.n_samples.to_string()),
        ("empirical", fmt(report.empirical.estimate)),
        ("std_error", fmt(report.empirical.std_error)),
        ("oracle", opt(report.oracle)),
        ("oracle_gap_se", opt(report.oracle_gap_se)),
        ("theorem1", opt(report.theorem1.as_ref().map(|b| b.structural_total))),
        ("bai_silverstein", opt(report.bai_silverstein.as_ref().map(|b| b.structural_total))),
    ];
    let markov_rows: Vec<String> = report
        .markov
        .iter()
        .map(|c| format!("r={} tail={} bound={} holds={}", c.r, c.tail_fraction, c.moment_over_rq, c.holds))
        .collect();
    for m in &markov_rows {
        rows.push(("markov", m.clone()));
    }
    for f in &report.flags {
        rows.push(("flag", f.clone()));
    }
    rows.push(("pass", report.pass.to_string()));
    let text = pairs(&rows);
    Report::new(&report, text)
}

fn hypothesis_pair(s: &Settings) -> Result<HypothesisPair, CliError> {
    let family = s.gen()?;
    match (s.null()?, s.alt()?) {
        (Some(a), Some(b)) => {
            let (a, b) = (load_matrix(&a)?, load_matrix(&b)?);
            if family.as_deref() == Some("sparse") {
                if a != gen_identity(a.dim())? {
                    return Err(CliError::Domain("sparse tests need the identity as null".into()));
                }
                let class = SparseClass {
                    r: s.r()?,
                    m_p: s.mp()?,
                    c0: s.c0()?,
                };
                Ok(HypothesisPair::sparse(b, class)?)
            } else {
                Ok(HypothesisPair::block_diagonal(a, b, s.k()?, s.m()?)?)
            }
        }
        (None, None) => match family.as_deref().unwrap_or("block") {
            "block" => Ok(HypothesisPair::block_ones_vs_identity(s.k()?, s.m()?)?),
            "sparse" => Ok(HypothesisPair::sparse_generated(s.p()?, s.r()?, s.mp()?, s.seed()?)?),
            other => Err(CliError::Input(format!("unknown test family {other:?}; use block or sparse"))),
        },
        _ => Err(CliError::Input("--null and --alt must be given together".into())),
    }
}

pub fn test(s: &Settings) -> Result<Report, CliError> {
    let pair = hypothesis_pair(s)?;
    let seed = s.seed()?;
    let dist = s.dist()?;
    let q = s.q()?;
    let data = match s.data()? {
        Some(path) => DataMatrix::read_csv(open(&path)?).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?,
        None => simulate_observations(pair.truth(s.under_alternative()?), &dist, s.n()?, seed)?,
    };
    let method = match s.method()?.unwrap_or(defaults().test_method).as_str() {
        "gaussian_mc_percentile" => TestMethod::GaussianMcPercentile {
            n_draws: s.samples()?,
            seed,
        },
        "conservative_theorem1" => TestMethod::ConservativeTheorem1 {
            profile: analytic_profile(&dist, q)?,
            cq: s.cq()?,
        },
        "conservative_corollary1" => TestMethod::ConservativeCorollary1 { q, cq: s.cq()? },
        other => {
            return Err(CliError::Input(format!(
                "unknown test method {other:?}; use gaussian_mc_percentile, conservative_theorem1 or \
                 conservative_corollary1"
            )))
        }
    };
    let outcome: TestOutcome = run_test(&data, &pair, &method, s.alpha()?)?;
    let text = pairs(&[
        ("method", outcome.method.as_str().to_string()),
        ("l_n", fmt(outcome.l_n)),
        ("l_star", fmt(outcome.l_star)),
        ("critical_value", fmt(outcome.critical_value)),
        ("alpha", fmt(outcome.alpha)),
        ("reject", outcome.reject.to_string()),
    ]);
    let report = Report::new(&outcome, text)?;
    Ok(if outcome.reject { report.with_exit(EXIT_REJECT) } else { report })
}

/// Writes simulated observations as a data CSV.
pub fn simulate(s: &Settings) -> Result<String, CliError> {
    let omega = matrix(s)?;
    let data = simulate_observations(&omega, &s.dist()?, s.n()?, s.seed()?)?;
    let mut buf = Vec::new();
    data.write_csv(&mut buf)?;
    String::from_utf8(buf).map_err(|e| CliError::Domain(e.to_string()))
}

#[derive(Serialize)]
struct PercentileReport {
    critical_value: f64,
    n: usize,
    alpha: f64,
    n_draws: usize,
    seed: u64,
}

pub fn percentile(s: &Settings) -> Result<Report, CliError> {
    let g = matrix(s)?;
    let report = PercentileReport {
        n: s.n()?,
        alpha: s.alpha()?,
        n_draws: s.samples()?,
        seed: s.seed()?,
        critical_value: 0.0,
    };
    let critical_value = gaussian_null_percentile(&g, report.n, report.alpha, report.n_draws, report.seed)?;
    let report = PercentileReport {
        critical_value,
        ..report
    };
    let text = pairs(&[
        ("critical_value", fmt(report.critical_value)),
        ("n", report.n.to_string()),
        ("alpha", fmt(report.alpha)),
        ("n_draws", report.n_draws.to_string()),
        ("seed", report.seed.to_string()),
    ]);
    Report::new(&report, text)
}

pub fn show_defaults() -> Result<Report, CliError> {
    let d = defaults();
    let value = serde_json::to_value(&d).map_err(|e| CliError::Domain(e.to_string()))?;
    let rows: Vec<(String, String)> = value
        .as_object()
        .map(|o| {
            o.iter()
                .map(|(k, v)| (k.clone(), v.as_str().map_or_else(|| v.to_string(), str::to_string)))
                .collect()
        })
        .unwrap_or_default();
    let borrowed: Vec<(&str, String)> = rows.iter().map(|(k, v)| (k.as_str(), v.clone())).collect();
    Report::new(&d, pairs(&borrowed))
}
