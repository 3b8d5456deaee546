//! Sweep configuration.
//!
//! The config file is flat `key = value` text. Blank lines and lines
//! starting with `#` are ignored; a trailing `# ...` on a value line is a
//! comment too. Keys:
//!
//! ```text
//! grid        = n:m_spec:p_spec [; n:m_spec:p_spec ...]   (repeatable, appends)
//! trials      = 10
//! seed        = 42
//! solvers     = greedy, block_greedy, best_of(32), lp, lp_bounds, ip_exact(100000), ip_bruteforce
//! epsilon     = 0.25
//! out         = results.csv
//! parallelism = 4
//! force_large = false
//! timings     = false
//! c_tilde     = 0.5
//! t_lo, t_hi, gamma0 = regime thresholds
//! conjecture  = very_sparse | sparse | dense
//! ladder      = 500, 1000, 2000
//! ladder_m    = m_spec
//! ladder_p    = p_spec
//! ```
//!
//! `m_spec` is an integer, or `a*n^b` meaning `⌊a·n^b⌋` (`n^b` and `n` are
//! accepted). `p_spec` is a real, `c*n^-d` meaning `c·n^{−d}`, or `c/m`.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use randhs_core::greedy::DEFAULT_EPSILON;
use randhs_core::lp::DEFAULT_C_TILDE;
use randhs_core::RegimeThresholds;

use crate::{CliError, Result};

pub const DEFAULT_BEST_OF: usize = 32;
pub const DEFAULT_IP_NODE_LIMIT: usize = 200_000;
/// `ip_exact` is skipped above this `n` unless forced.
pub const IP_AUTO_MAX_N: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SizeSpec {
    Literal(usize),
    /// `⌊a·n^b⌋`.
    Power { a: f64, b: f64 },
}

impl SizeSpec {
    pub fn resolve(&self, n: usize) -> usize {
        match *self {
            SizeSpec::Literal(m) => m,
            SizeSpec::Power { a, b } => (a * (n as f64).powf(b) + 1e-9).floor() as usize,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProbSpec {
    Literal(f64),
    /// `c·n^{−d}`.
    Power { c: f64, d: f64 },
    /// `c/m`.
    PerRow(f64),
}

impl ProbSpec {
    pub fn resolve(&self, n: usize, m: usize) -> f64 {
        match *self {
            ProbSpec::Literal(p) => p,
            ProbSpec::Power { c, d } => c * (n as f64).powf(-d),
            ProbSpec::PerRow(c) => c / m as f64,
        }
    }
}

/// `coef*n^exp`, `n^exp`, `coef*n` or `n`.
fn parse_power(s: &str) -> Option<(f64, f64)> {
    let (coef, rest): (f64, &str) = match s.split_once('*') {
        Some((c, r)) => (c.trim().parse().ok()?, r.trim()),
        None => (1.0, s),
    };
    let exp: f64 = match rest.strip_prefix('n')? {
        "" => 1.0,
        e => e.trim().strip_prefix('^')?.trim().parse().ok()?,
    };
    (coef.is_finite() && exp.is_finite()).then_some((coef, exp))
}

impl FromStr for SizeSpec {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Ok(m) = s.parse() {
            return Ok(SizeSpec::Literal(m));
        }
        match parse_power(s) {
            Some((a, b)) if a > 0.0 => Ok(SizeSpec::Power { a, b }),
            _ => Err(CliError::config(format!("bad m spec {s:?}"))),
        }
    }
}

impl FromStr for ProbSpec {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Ok(p) = s.parse::<f64>() {
            return Ok(ProbSpec::Literal(p));
        }
        if let Some(c) = s.strip_suffix("/m") {
            if let Ok(c) = c.trim().parse::<f64>() {
                return Ok(ProbSpec::PerRow(c));
            }
        }
        match parse_power(s) {
            Some((c, e)) if c > 0.0 => Ok(ProbSpec::Power { c, d: -e }),
            _ => Err(CliError::config(format!("bad p spec {s:?}"))),
        }
    }
}

impl fmt::Display for SizeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SizeSpec::Literal(m) => write!(f, "{m}"),
            SizeSpec::Power { a, b } => write!(f, "{a}*n^{b}"),
        }
    }
}

impl fmt::Display for ProbSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProbSpec::Literal(p) => write!(f, "{p}"),
            ProbSpec::Power { c, d } => write!(f, "{c}*n^-{d}"),
            ProbSpec::PerRow(c) => write!(f, "{c}/m"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    pub n: usize,
    pub m: SizeSpec,
    pub p: ProbSpec,
}

impl GridPoint {
    pub fn literal(n: usize, m: usize, p: f64) -> Self {
        GridPoint {
            n,
            m: SizeSpec::Literal(m),
            p: ProbSpec::Literal(p),
        }
    }

    /// Concrete `(n, m, p)`.
    pub fn resolve(&self) -> (usize, usize, f64) {
        let m = self.m.resolve(self.n);
        (self.n, m, self.p.resolve(self.n, m))
    }
}

impl FromStr for GridPoint {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let [n, m, p] = parts[..] else {
            return Err(CliError::config(format!("grid point {s:?} is not n:m:p")));
        };
        let n = n
            .trim()
            .parse()
            .map_err(|_| CliError::config(format!("bad n in grid point {s:?}")))?;
        Ok(GridPoint {
            n,
            m: m.parse()?,
            p: p.parse()?,
        })
    }
}

/// `;`-separated grid points.
pub fn parse_grid(s: &str) -> Result<Vec<GridPoint>> {
    s.split(';')
        .filter(|t| !t.trim().is_empty())
        .map(str::parse)
        .collect()
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SolverSet {
    pub greedy: bool,
    pub block_greedy: bool,
    /// `J` of best-of-`J` block greedy.
    pub best_of: Option<usize>,
    pub lp: bool,
    pub lp_bounds: bool,
    /// Node limit of branch and bound.
    pub ip_exact: Option<usize>,
    pub ip_bruteforce: bool,
}

impl SolverSet {
    pub fn is_empty(&self) -> bool {
        *self == SolverSet::default()
    }

    pub fn has_ip(&self) -> bool {
        self.ip_exact.is_some() || self.ip_bruteforce
    }
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            grid: Vec::new(),
            trials: 1,
            base_seed: 0,
            solvers: "greedy, block_greedy, lp, lp_bounds".parse().unwrap(),
            schedule_epsilon: DEFAULT_EPSILON,
            output_path: None,
            parallelism: 1,
            force_large: false,
            timings: false,
            c_tilde: DEFAULT_C_TILDE,
            thresholds: RegimeThresholds::default(),
            conjecture: None,
            ladder: Vec::new(),
            ladder_m: None,
            ladder_p: None,
        }
    }
}

fn parse_arg(item: &str, name: &str) -> Result<Option<usize>> {
    let Some(rest) = item.strip_prefix(name) else {
        return Ok(None);
    };
    let bad = || CliError::config(format!("bad solver argument in {item:?}"));
    let inner = rest
        .trim()
        .strip_prefix('(')
        .and_then(|r| r.strip_suffix(')'))
        .ok_or_else(bad)?;
    inner.trim().parse().map(Some).map_err(|_| bad())
}

impl FromStr for SolverSet {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        let mut set = SolverSet::default();
        for item in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            match item {
                "greedy" => set.greedy = true,
                "block_greedy" => set.block_greedy = true,
                "best_of" => set.best_of = Some(DEFAULT_BEST_OF),
                "lp" => set.lp = true,
                "lp_bounds" => set.lp_bounds = true,
                "ip_exact" => set.ip_exact = Some(DEFAULT_IP_NODE_LIMIT),
                "ip_bruteforce" => set.ip_bruteforce = true,
                _ => {
                    if let Some(j) = parse_arg(item, "best_of")? {
                        set.best_of = Some(j);
                    } else if let Some(k) = parse_arg(item, "ip_exact")? {
                        set.ip_exact = Some(k);
                    } else {
                        return Err(CliError::config(format!("unknown solver {item:?}")));
                    }
                }
            }
        }
        Ok(set)
    }
}

impl fmt::Display for SolverSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut items = Vec::new();
        if self.greedy {
            items.push("greedy".to_owned());
        }
        if self.block_greedy {
            items.push("block_greedy".to_owned());
        }
        if let Some(j) = self.best_of {
            items.push(format!("best_of({j})"));
        }
        if self.lp {
            items.push("lp".to_owned());
        }
        if self.lp_bounds {
            items.push("lp_bounds".to_owned());
        }
        if let Some(k) = self.ip_exact {
            items.push(format!("ip_exact({k})"));
        }
        if self.ip_bruteforce {
            items.push("ip_bruteforce".to_owned());
        }
        f.write_str(&items.join(", "))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Conjecture {
    /// `mp ≪ 1`: `val_gr / val_lp`.
    VerySparse,
    /// `val_ip / val_lp`.
    Sparse,
    /// `val_gr / val_ip`.
    Dense,
}

impl Conjecture {
    pub fn as_str(self) -> &'static str {
        match self {
            Conjecture::VerySparse => "very_sparse",
            Conjecture::Sparse => "sparse",
            Conjecture::Dense => "dense",
        }
    }

    /// Name of the reported ratio.
    pub fn ratio_name(self) -> &'static str {
        match self {
            Conjecture::VerySparse => "val_gr/val_lp",
            Conjecture::Sparse => "val_ip/val_lp",
            Conjecture::Dense => "val_gr/val_ip",
        }
    }
}

impl FromStr for Conjecture {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "very_sparse" | "very-sparse" => Ok(Conjecture::VerySparse),
            "sparse" => Ok(Conjecture::Sparse),
            "dense" => Ok(Conjecture::Dense),
            other => Err(CliError::config(format!("unknown conjecture regime {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub grid: Vec<GridPoint>,
    pub trials: usize,
    pub base_seed: u64,
    pub solvers: SolverSet,
    pub schedule_epsilon: f64,
    /// `None` writes to stdout.
    pub output_path: Option<PathBuf>,
    pub parallelism: usize,
    /// Lifts the LP size guard and the `ip_exact` auto-skip.
    pub force_large: bool,
    /// Fill the `rt_*_ms` columns. Off by default so that CSVs are reproducible byte for byte.
    pub timings: bool,
    pub c_tilde: f64,
    pub thresholds: RegimeThresholds,
    pub conjecture: Option<Conjecture>,
    pub ladder: Vec<usize>,
    pub ladder_m: Option<SizeSpec>,
    pub ladder_p: Option<ProbSpec>,
}

fn parse_num<T: FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse()
        .map_err(|_| CliError::config(format!("bad value {v:?} for {key}")))
}

fn parse_bool(key: &str, v: &str) -> Result<bool> {
    match v {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        _ => Err(CliError::config(format!("bad boolean {v:?} for {key}"))),
    }
}

impl ExperimentConfig {
    pub fn from_text(text: &str) -> Result<Self> {
        let mut cfg = ExperimentConfig::default();
        for (ln, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::config(format!("line {}: expected key = value", ln + 1))
            })?;
            cfg.set(key.trim(), value.trim())
                .map_err(|e| CliError::config(format!("line {}: {}", ln + 1, strip(e))))?;
        }
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_text(&text)
    }

    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, v: &str) -> Result<()> {
        match key {
            "grid" => self.grid.extend(parse_grid(v)?),
            "trials" => self.trials = parse_num(key, v)?,
            "seed" | "base_seed" => self.base_seed = parse_num(key, v)?,
            "solvers" => self.solvers = v.parse()?,
            "epsilon" | "schedule_epsilon" => self.schedule_epsilon = parse_num(key, v)?,
            "out" | "output_path" => self.output_path = Some(PathBuf::from(v)),
            "parallelism" => self.parallelism = parse_num(key, v)?,
            "force_large" => self.force_large = parse_bool(key, v)?,
            "timings" => self.timings = parse_bool(key, v)?,
            "c_tilde" => self.c_tilde = parse_num(key, v)?,
            "t_lo" => self.thresholds.t_lo = parse_num(key, v)?,
            "t_hi" => self.thresholds.t_hi = parse_num(key, v)?,
            "gamma0" => self.thresholds.gamma0 = parse_num(key, v)?,
            "conjecture" => self.conjecture = Some(v.parse()?),
            "ladder" => {
                self.ladder = v
                    .split(',')
                    .map(|t| parse_num(key, t.trim()))
                    .collect::<Result<_>>()?
            }
            "ladder_m" => self.ladder_m = Some(v.parse()?),
            "ladder_p" => self.ladder_p = Some(v.parse()?),
            _ => return Err(CliError::config(format!("unknown key {key:?}"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(CliError::config("trials must be at least 1"));
        }
        if self.solvers.is_empty() {
            return Err(CliError::config("no solver enabled"));
        }
        if self.solvers.best_of == Some(0) {
            return Err(CliError::config("best_of needs J >= 1"));
        }
        if self.parallelism == 0 {
            return Err(CliError::config("parallelism must be at least 1"));
        }
        if !(self.schedule_epsilon > 0.0 && self.schedule_epsilon < 1.0) {
            return Err(CliError::config("epsilon must lie in (0,1)"));
        }
        if self.grid.is_empty() {
            return Err(CliError::config("empty grid"));
        }
        for g in &self.grid {
            let (n, m, p) = g.resolve();
            if n == 0 || m == 0 {
                return Err(CliError::config(format!("grid point n = {n}, m = {m} is empty")));
            }
            if !(0.0..=1.0).contains(&p) {
                return Err(CliError::config(format!("grid point resolves to p = {p}")));
            }
        }
        Ok(())
    }
}

fn strip(e: CliError) -> String {
    match e {
        CliError::Config(s) => s,
        other => other.to_string(),
    }
}
