//! Run configuration: command-line flags over an optional `key = value`
//! file over built-in defaults.

use std::collections::BTreeMap;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use cubecar::norms::FunctionSpace;
use cubecar::verify::{Request, SLACK};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Text,
}

impl Format {
    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "json" => Format::Json,
            "csv" => Format::Csv,
            "text" => Format::Text,
            _ => bail!("unknown format `{s}` (expected json, csv or text)"),
        })
    }
}

/// Flag values as given; `None` means the flag was absent.
#[derive(Debug, Clone, Default, clap::Args)]
pub struct Flags {
    /// Number of sites or cube dimension.
    #[arg(long)]
    pub n: Option<usize>,
    /// Function space: lp:<p>, linf or orlicz.
    #[arg(long)]
    pub space: Option<String>,
    /// Random instances per check.
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Exponent of the fractional and number-operator parts.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Exponent of the reverse and moment inequalities.
    #[arg(long)]
    pub beta: Option<f64>,
    /// Semigroup time for the `semigroup` check.
    #[arg(long)]
    pub theta0: Option<f64>,
    /// Universal constant of the non-sharp Khintchine estimates.
    #[arg(long = "C")]
    pub c: Option<f64>,
    /// Additive slack on every inequality.
    #[arg(long)]
    pub slack: Option<f64>,
    /// Number of coordinate sets J for the `appendix` check.
    #[arg(long)]
    pub j_samples: Option<usize>,
    /// Comma-separated thresholds for the concentration checks.
    #[arg(long)]
    pub t_grid: Option<String>,
    /// Largest dimension of the Riesz growth table.
    #[arg(long)]
    pub n_max: Option<usize>,
    /// Exponent p of the Riesz growth table.
    #[arg(long)]
    pub p: Option<f64>,
    /// Run trials on one thread.
    #[arg(long)]
    pub sequential: bool,
    /// Output format: json, csv or text.
    #[arg(long)]
    pub format: Option<String>,
    /// Write output here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// File of `key = value` lines supplying defaults for the flags above.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// Fully resolved settings for one invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub n: usize,
    pub space: FunctionSpace,
    pub trials: usize,
    pub seed: u64,
    pub alpha: f64,
    pub beta: f64,
    pub theta0: f64,
    pub c: f64,
    pub slack: f64,
    pub j_samples: usize,
    pub t_grid: Vec<f64>,
    pub n_max: usize,
    pub p: f64,
    pub sequential: bool,
    pub format: Format,
    pub out: Option<PathBuf>,
}

const KEYS: [&str; 16] = [
    "n", "space", "trials", "seed", "alpha", "beta", "theta0", "C", "slack", "j_samples", "t_grid", "n_max", "p",
    "sequential", "format", "out",
];

/// Parses `key = value` lines; `#` starts a comment, dashes in keys read as
/// underscores.
pub fn parse_file(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            bail!("config line {}: expected `key = value`", i + 1);
        };
        let key = k.trim().replace('-', "_");
        if !KEYS.contains(&key.as_str()) {
            bail!("config line {}: unknown key `{}`", i + 1, k.trim());
        }
        out.insert(key, v.trim().to_string());
    }
    Ok(out)
}

fn pick<T: std::str::FromStr>(flag: Option<T>, file: &BTreeMap<String, String>, key: &str, default: T) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    if let Some(v) = flag {
        return Ok(v);
    }
    match file.get(key) {
        Some(s) => s.parse().map_err(|e| anyhow::anyhow!("config key `{key}`: {e}")),
        None => Ok(default),
    }
}

fn parse_grid(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().with_context(|| format!("bad t-grid entry `{t}`")))
        .collect()
}

impl Flags {
    pub fn resolve(&self) -> Result<RunConfig> {
        let file = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                parse_file(&text)?
            }
            None => BTreeMap::new(),
        };
        let base = Request::new("poincare");
        let space = pick(self.space.clone(), &file, "space", base.space.label())?;
        let format = pick(self.format.clone(), &file, "format", "json".to_string())?;
        let t_grid = pick(self.t_grid.clone(), &file, "t_grid", String::new())?;
        let sequential = self.sequential || pick(None, &file, "sequential", false)?;
        let out = match &self.out {
            Some(p) => Some(p.clone()),
            None => file.get("out").map(PathBuf::from),
        };
        let cfg = RunConfig {
            n: pick(self.n, &file, "n", base.n)?,
            space: FunctionSpace::parse(&space)?,
            trials: pick(self.trials, &file, "trials", base.trials)?,
            seed: pick(self.seed, &file, "seed", base.seed)?,
            alpha: pick(self.alpha, &file, "alpha", base.alpha)?,
            beta: pick(self.beta, &file, "beta", base.beta)?,
            theta0: pick(self.theta0, &file, "theta0", base.theta0)?,
            c: pick(self.c, &file, "C", 1.0)?,
            slack: pick(self.slack, &file, "slack", SLACK)?,
            j_samples: pick(self.j_samples, &file, "j_samples", base.j_samples)?,
            t_grid: if t_grid.is_empty() { Vec::new() } else { parse_grid(&t_grid)? },
            n_max: pick(self.n_max, &file, "n_max", base.n_max)?,
            p: pick(self.p, &file, "p", 2.0)?,
            sequential,
            format: Format::parse(&format)?,
            out,
        };
        if !(cfg.c > 0.0 && cfg.c.is_finite()) {
            bail!("--C must be a positive number, got {}", cfg.c);
        }
        if !(cfg.slack >= 0.0 && cfg.slack.is_finite()) {
            bail!("--slack must be a non-negative number, got {}", cfg.slack);
        }
        Ok(cfg)
    }
}

impl RunConfig {
    pub fn request(&self, theorem: &str) -> Request {
        Request {
            theorem: theorem.to_string(),
            n: self.n,
            space: self.space,
            trials: self.trials,
            seed: self.seed,
            alpha: self.alpha,
            beta: self.beta,
            theta0: self.theta0,
            j_samples: self.j_samples,
            t_grid: self.t_grid.clone(),
            n_max: self.n_max,
        }
    }
}
