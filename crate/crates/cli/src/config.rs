//! Command-line flags, the key=value config file, and the merged settings.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::str::FromStr;

use clap::Args;
use qforma::ComponentDistribution;
use serde::Serialize;

use crate::error::CliError;

pub const SEED_ENV: &str = "QFORMA_SEED";

/// Flags shared by every subcommand. Each one may also be given in the
/// config file under the same name (without dashes).
#[derive(Debug, Default, Args)]
pub struct Params {
    /// Read defaults from a file of `key = value` lines
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Generated matrix family: identity, zero, ones, block, block-null,
    /// sparse, sparse-precision, random
    #[arg(long, global = true)]
    pub gen: Option<String>,
    /// Matrix file, dense CSV or sparse triplets
    #[arg(long, global = true, value_name = "FILE")]
    pub matrix: Option<PathBuf>,
    /// Null precision matrix file for `test`
    #[arg(long, global = true, value_name = "FILE")]
    pub null: Option<PathBuf>,
    /// Alternative precision matrix file for `test`
    #[arg(long, global = true, value_name = "FILE")]
    pub alt: Option<PathBuf>,
    /// Data file (`n p` header, then rows) for `test`
    #[arg(long, global = true, value_name = "FILE")]
    pub data: Option<PathBuf>,
    #[arg(long, global = true)]
    pub p: Option<usize>,
    #[arg(long, global = true)]
    pub q: Option<f64>,
    /// Block size
    #[arg(long, global = true)]
    pub k: Option<usize>,
    /// Number of blocks
    #[arg(long, global = true)]
    pub m: Option<usize>,
    /// Sparsity exponent in [0, 1)
    #[arg(long, global = true)]
    pub r: Option<f64>,
    /// Column l^r budget M_p
    #[arg(long, global = true)]
    pub mp: Option<f64>,
    /// Spectral radius cap C0
    #[arg(long, global = true)]
    pub c0: Option<f64>,
    /// Generic constant multiplying the structural bound
    #[arg(long, global = true)]
    pub cq: Option<f64>,
    /// Component law: gaussian, rademacher, student_t(df),
    /// centered_exponential, uniform_standardized
    #[arg(long, global = true)]
    pub dist: Option<String>,
    #[arg(long, global = true)]
    pub alpha: Option<f64>,
    /// Sample size
    #[arg(long, global = true)]
    pub n: Option<usize>,
    /// Seed (falls back to the config file, then QFORMA_SEED, then 0)
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Monte Carlo samples or draws
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    /// Write the report here instead of stdout
    #[arg(long, global = true, value_name = "FILE")]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub method: Option<String>,
    /// json or table
    #[arg(long, global = true)]
    pub format: Option<String>,
    /// Comma-separated dimensions for `compare-scaling`
    #[arg(long, global = true)]
    pub grid: Option<String>,
    /// Simulate `test` data under `null` or `alt`
    #[arg(long, global = true)]
    pub under: Option<String>,
    /// Write the raw `verify` samples here
    #[arg(long, global = true, value_name = "FILE")]
    pub dump: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Table,
}

impl FromStr for Format {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "json" => Ok(Self::Json),
            "table" => Ok(Self::Table),
            _ => Err(CliError::Input(format!("unknown format {s:?}; use json or table"))),
        }
    }
}

/// Values used when neither a flag nor the config file sets a key.
#[derive(Debug, Clone, Serialize)]
pub struct Defaults {
    pub p: usize,
    pub q: f64,
    pub k: usize,
    pub m: usize,
    pub r: f64,
    pub mp: f64,
    pub c0: f64,
    pub cq: f64,
    pub dist: String,
    pub alpha: f64,
    pub n: usize,
    pub seed: u64,
    pub samples: usize,
    pub format: Format,
    pub grid: String,
    pub under: String,
    pub bound_method: String,
    pub test_method: String,
}

pub fn defaults() -> Defaults {
    Defaults {
        p: 8,
        q: 4.0,
        k: 2,
        m: 2,
        r: 0.5,
        mp: 2.0,
        c0: 1.5,
        cq: 1.0,
        dist: "gaussian".into(),
        alpha: 0.05,
        n: 50,
        seed: 0,
        samples: qforma::montecarlo::DEFAULT_SAMPLES,
        format: Format::Json,
        grid: "16,64,256,1024".into(),
        under: "null".into(),
        bound_method: "theorem1".into(),
        test_method: "gaussian_mc_percentile".into(),
    }
}

const KEYS: &[&str] = &[
    "gen", "matrix", "null", "alt", "data", "p", "q", "k", "m", "r", "mp", "c0", "cq", "dist", "alpha", "n", "seed",
    "samples", "out", "method", "format", "grid", "under", "dump",
];

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Input(format!("config line {}: expected key = value", i + 1)))?;
        let (k, v) = (k.trim(), v.trim());
        if !KEYS.contains(&k) {
            return Err(CliError::Input(format!("config line {}: unknown key {k:?}", i + 1)));
        }
        if map.insert(k.to_string(), v.to_string()).is_some() {
            return Err(CliError::Input(format!("config line {}: duplicate key {k:?}", i + 1)));
        }
    }
    Ok(map)
}

/// Flags merged over the config file, with defaults applied lazily by the
/// accessors.
#[derive(Debug)]
pub struct Settings {
    params: Params,
    file: BTreeMap<String, String>,
    env_seed: Option<String>,
}

fn parse_value<T: FromStr>(key: &str, raw: &str) -> Result<T, CliError> {
    raw.parse()
        .map_err(|_| CliError::Input(format!("invalid value {raw:?} for {key}")))
}

impl Settings {
    pub fn load(params: Params) -> Result<Self, CliError> {
        let file = match &params.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::Input(format!("cannot read config {}: {e}", path.display())))?;
                parse_config(&text)?
            }
            None => BTreeMap::new(),
        };
        Ok(Self {
            params,
            file,
            env_seed: std::env::var(SEED_ENV).ok(),
        })
    }

    fn from_file<T: FromStr>(&self, key: &str) -> Result<Option<T>, CliError> {
        self.file.get(key).map(|v| parse_value(key, v)).transpose()
    }

    fn pick<T: FromStr + Clone>(&self, flag: &Option<T>, key: &str) -> Result<Option<T>, CliError> {
        match flag {
            Some(v) => Ok(Some(v.clone())),
            None => self.from_file(key),
        }
    }

    pub fn gen(&self) -> Result<Option<String>, CliError> {
        self.pick(&self.params.gen, "gen")
    }

    pub fn matrix(&self) -> Result<Option<PathBuf>, CliError> {
        self.pick(&self.params.matrix, "matrix")
    }

    pub fn null(&self) -> Result<Option<PathBuf>, CliError> {
        self.pick(&self.params.null, "null")
    }

    pub fn alt(&self) -> Result<Option<PathBuf>, CliError> {
        self.pick(&self.params.alt, "alt")
    }

    pub fn data(&self) -> Result<Option<PathBuf>, CliError> {
        self.pick(&self.params.data, "data")
    }

    pub fn out(&self) -> Result<Option<PathBuf>, CliError> {
        self.pick(&self.params.out, "out")
    }

    pub fn dump(&self) -> Result<Option<PathBuf>, CliError> {
        self.pick(&self.params.dump, "dump")
    }

    pub fn method(&self) -> Result<Option<String>, CliError> {
        self.pick(&self.params.method, "method")
    }

    pub fn p(&self) -> Result<usize, CliError> {
        Ok(self.pick(&self.params.p, "p")?.unwrap_or(defaults().p))
    }

    pub fn q(&self) -> Result<f64, CliError> {
        Ok(self.pick(&self.params.q, "q")?.unwrap_or(defaults().q))
    }

    pub fn k(&self) -> Result<usize, CliError> {
        Ok(self.pick(&self.params.k, "k")?.unwrap_or(defaults().k))
    }

    pub fn m(&self) -> Result<usize, CliError> {
        Ok(self.pick(&self.params.m, "m")?.unwrap_or(defaults().m))
    }

    pub fn r(&self) -> Result<f64, CliError> {
        Ok(self.pick(&self.params.r, "r")?.unwrap_or(defaults().r))
    }

    pub fn mp_opt(&self) -> Result<Option<f64>, CliError> {
        self.pick(&self.params.mp, "mp")
    }

    pub fn mp(&self) -> Result<f64, CliError> {
        Ok(self.mp_opt()?.unwrap_or(defaults().mp))
    }

    pub fn c0(&self) -> Result<f64, CliError> {
        Ok(self.pick(&self.params.c0, "c0")?.unwrap_or(defaults().c0))
    }

    pub fn cq(&self) -> Result<f64, CliError> {
        Ok(self.pick(&self.params.cq, "cq")?.unwrap_or(defaults().cq))
    }

    pub fn dist_opt(&self) -> Result<Option<ComponentDistribution>, CliError> {
        match self.pick(&self.params.dist, "dist")? {
            Some(s) => Ok(Some(s.parse::<ComponentDistribution>().map_err(CliError::from)?)),
            None => Ok(None),
        }
    }

    pub fn dist(&self) -> Result<ComponentDistribution, CliError> {
        match self.dist_opt()? {
            Some(d) => Ok(d),
            None => Ok(defaults().dist.parse().map_err(CliError::from)?),
        }
    }

    pub fn alpha(&self) -> Result<f64, CliError> {
        Ok(self.pick(&self.params.alpha, "alpha")?.unwrap_or(defaults().alpha))
    }

    pub fn n(&self) -> Result<usize, CliError> {
        Ok(self.pick(&self.params.n, "n")?.unwrap_or(defaults().n))
    }

    /// Flag, then config file, then `QFORMA_SEED`, then the default.
    pub fn seed(&self) -> Result<u64, CliError> {
        if let Some(s) = self.pick(&self.params.seed, "seed")? {
            return Ok(s);
        }
        match &self.env_seed {
            Some(v) => parse_value(SEED_ENV, v.trim()),
            None => Ok(defaults().seed),
        }
    }

    pub fn samples(&self) -> Result<usize, CliError> {
        Ok(self.pick(&self.params.samples, "samples")?.unwrap_or(defaults().samples))
    }

    pub fn format(&self) -> Result<Format, CliError> {
        match self.pick(&self.params.format, "format")? {
            Some(s) => s.parse(),
            None => Ok(defaults().format),
        }
    }

    pub fn grid(&self) -> Result<Vec<usize>, CliError> {
        let raw = self.pick(&self.params.grid, "grid")?.unwrap_or(defaults().grid);
        raw.split(',')
            .map(|t| parse_value::<usize>("grid", t.trim()))
            .collect()
    }

    /// `true` when test data should be simulated under the alternative.
    pub fn under_alternative(&self) -> Result<bool, CliError> {
        match self.pick(&self.params.under, "under")?.as_deref().unwrap_or("null") {
            "null" => Ok(false),
            "alt" => Ok(true),
            other => Err(CliError::Input(format!("--under must be null or alt, got {other:?}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_lines() {
        let m = parse_config("# comment\nq = 6\n\nseed=3 # trailing\n").unwrap();
        assert_eq!(m.get("q").map(String::as_str), Some("6"));
        assert_eq!(m.get("seed").map(String::as_str), Some("3"));
        assert!(parse_config("bogus = 1").is_err());
        assert!(parse_config("q").is_err());
        assert!(parse_config("q = 1\nq = 2").is_err());
    }

    #[test]
    fn flags_override_file() {
        let s = Settings {
            params: Params {
                q: Some(3.0),
                ..Params::default()
            },
            file: parse_config("q = 6\nn = 7\nseed = 5").unwrap(),
            env_seed: Some("9".into()),
        };
        assert_eq!(s.q().unwrap(), 3.0);
        assert_eq!(s.n().unwrap(), 7);
        assert_eq!(s.seed().unwrap(), 5);
        assert_eq!(s.alpha().unwrap(), 0.05);
    }

    #[test]
    fn env_seed_is_the_last_fallback() {
        let s = Settings {
            params: Params::default(),
            file: BTreeMap::new(),
            env_seed: Some("42".into()),
        };
        assert_eq!(s.seed().unwrap(), 42);
        let bad = Settings {
            params: Params::default(),
            file: BTreeMap::new(),
            env_seed: Some("x".into()),
        };
        assert!(bad.seed().is_err());
    }
}
