//! One CSV row per trial.

use std::io::{Read, Write};

use crate::{CliError, Result};

pub const CSV_HEADER: [&str; 23] = [
    "n",
    "m",
    "p",
    "seed",
    "regime",
    "dmax",
    "val_lp",
    "lp_lb",
    "lp_ub_uniform",
    "val_ip",
    "ip_optimal",
    "val_gr",
    "val_bgr",
    "k_blocks",
    "trivial_fallback",
    "gap_ip_lp",
    "gap_gr_ip",
    "gap_bgr_ip",
    "rt_lp_ms",
    "rt_ip_ms",
    "rt_gr_ms",
    "rt_bgr_ms",
    "error",
];

/// Slack of the sandwich audit.
pub const AUDIT_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ExperimentRecord {
    pub n: usize,
    pub m: usize,
    pub p: f64,
    pub seed: u64,
    /// Empty when the point cannot be classified (`n < 2`).
    pub regime: String,
    pub dmax: usize,
    pub val_lp: Option<f64>,
    /// `m / dmax`; absent when `dmax = 0`.
    pub lp_lb: Option<f64>,
    pub lp_ub_uniform: Option<f64>,
    pub val_ip: Option<usize>,
    pub ip_optimal: Option<bool>,
    pub val_gr: Option<usize>,
    pub val_bgr: Option<usize>,
    pub k_blocks: Option<usize>,
    pub trivial_fallback: Option<bool>,
    pub gap_ip_lp: Option<f64>,
    pub gap_gr_ip: Option<f64>,
    pub gap_bgr_ip: Option<f64>,
    pub rt_lp_ms: Option<f64>,
    pub rt_ip_ms: Option<f64>,
    pub rt_gr_ms: Option<f64>,
    pub rt_bgr_ms: Option<f64>,
    pub error: Option<String>,
}

/// `x` with 9 significant digits, trailing zeros dropped.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".to_owned();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.8e}");
    let (mant, exp) = sci.split_once('e').unwrap();
    let exp: i32 = exp.parse().unwrap();
    if (-5..9).contains(&exp) {
        trim_zeros(&format!("{:.*}", (8 - exp) as usize, x)).to_owned()
    } else {
        format!("{}e{exp}", trim_zeros(mant))
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

fn opt_f(v: Option<f64>) -> String {
    v.map(fmt_sig).unwrap_or_default()
}

impl ExperimentRecord {
    /// A record for `(n, m, p, seed)` with no solver output yet.
    pub fn new(n: usize, m: usize, p: f64, seed: u64) -> Self {
        ExperimentRecord {
            n,
            m,
            p,
            seed,
            ..Default::default()
        }
    }

    /// Appends to the `;`-separated error column.
    pub fn push_error(&mut self, msg: impl AsRef<str>) {
        match &mut self.error {
            Some(e) => {
                e.push_str("; ");
                e.push_str(msg.as_ref());
            }
            None => self.error = Some(msg.as_ref().to_owned()),
        }
    }

    /// `val_ip` when it is a proven optimum.
    pub fn optimal_ip(&self) -> Option<usize> {
        self.val_ip.filter(|_| self.ip_optimal == Some(true))
    }

    /// Fills the gap columns from the present values.
    pub fn compute_gaps(&mut self) {
        let ip = self.optimal_ip().map(|v| v as f64);
        self.gap_ip_lp = ip.zip(self.val_lp).map(|(i, l)| i / l);
        self.gap_gr_ip = self.val_gr.zip(ip).map(|(g, i)| g as f64 / i);
        self.gap_bgr_ip = self.val_bgr.zip(ip).map(|(b, i)| b as f64 / i);
    }

    pub fn ratio_gr_lp(&self) -> Option<f64> {
        self.val_gr.zip(self.val_lp).map(|(g, l)| g as f64 / l)
    }

    pub fn ratio_bgr_lp(&self) -> Option<f64> {
        self.val_bgr.zip(self.val_lp).map(|(b, l)| b as f64 / l)
    }

    /// Checks `lp_lb ≤ val_lp ≤ val_ip ≤ min(val_gr, val_bgr)` on the
    /// present values. `val_ip` only takes part when it is optimal.
    pub fn audit(&self) -> std::result::Result<(), String> {
        let covers: Vec<(&str, f64)> = [("val_gr", self.val_gr), ("val_bgr", self.val_bgr)]
            .into_iter()
            .filter_map(|(k, v)| v.map(|v| (k, v as f64)))
            .collect();
        let mut chain: Vec<(&str, f64)> = Vec::new();
        chain.extend(self.lp_lb.map(|v| ("lp_lb", v)));
        chain.extend(self.val_lp.map(|v| ("val_lp", v)));
        chain.extend(self.optimal_ip().map(|v| ("val_ip", v as f64)));
        for (i, &(lo_name, lo)) in chain.iter().enumerate() {
            let above = chain[i + 1..].iter().chain(&covers);
            for &(hi_name, hi) in above {
                if lo > hi + AUDIT_TOL {
                    return Err(format!(
                        "n={} m={} p={} seed={}: {lo_name} = {lo} > {hi_name} = {hi}",
                        self.n, self.m, self.p, self.seed
                    ));
                }
            }
        }
        Ok(())
    }

    fn to_fields(&self) -> Vec<String> {
        vec![
            self.n.to_string(),
            self.m.to_string(),
            fmt_sig(self.p),
            self.seed.to_string(),
            self.regime.clone(),
            self.dmax.to_string(),
            opt_f(self.val_lp),
            opt_f(self.lp_lb),
            opt_f(self.lp_ub_uniform),
            opt(self.val_ip),
            opt(self.ip_optimal),
            opt(self.val_gr),
            opt(self.val_bgr),
            opt(self.k_blocks),
            opt(self.trivial_fallback),
            opt_f(self.gap_ip_lp),
            opt_f(self.gap_gr_ip),
            opt_f(self.gap_bgr_ip),
            opt_f(self.rt_lp_ms),
            opt_f(self.rt_ip_ms),
            opt_f(self.rt_gr_ms),
            opt_f(self.rt_bgr_ms),
            self.error.clone().unwrap_or_default(),
        ]
    }

    fn from_fields(f: &csv::StringRecord, line: usize) -> Result<Self> {
        let err = |col: &str, v: &str| CliError::Parse {
            line,
            message: format!("bad {col} value {v:?}"),
        };
        let get = |i: usize| f.get(i).unwrap_or("");
        macro_rules! req {
            ($i:expr) => {{
                let v = get($i);
                v.parse().map_err(|_| err(CSV_HEADER[$i], v))?
            }};
        }
        macro_rules! opt {
            ($i:expr) => {{
                let v = get($i);
                if v.is_empty() {
                    None
                } else {
                    Some(v.parse().map_err(|_| err(CSV_HEADER[$i], v))?)
                }
            }};
        }
        Ok(ExperimentRecord {
            n: req!(0),
            m: req!(1),
            p: req!(2),
            seed: req!(3),
            regime: get(4).to_owned(),
            dmax: req!(5),
            val_lp: opt!(6),
            lp_lb: opt!(7),
            lp_ub_uniform: opt!(8),
            val_ip: opt!(9),
            ip_optimal: opt!(10),
            val_gr: opt!(11),
            val_bgr: opt!(12),
            k_blocks: opt!(13),
            trivial_fallback: opt!(14),
            gap_ip_lp: opt!(15),
            gap_gr_ip: opt!(16),
            gap_bgr_ip: opt!(17),
            rt_lp_ms: opt!(18),
            rt_ip_ms: opt!(19),
            rt_gr_ms: opt!(20),
            rt_bgr_ms: opt!(21),
            error: Some(get(22).to_owned()).filter(|e| !e.is_empty()),
        })
    }
}

pub fn write_records(out: impl Write, records: &[ExperimentRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in records {
        w.write_record(r.to_fields())?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_records(input: impl Read) -> Result<Vec<ExperimentRecord>> {
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let header = r.headers()?.clone();
    if header.iter().ne(CSV_HEADER) {
        return Err(CliError::Parse {
            line: 1,
            message: "header does not match the record schema".into(),
        });
    }
    let mut out = Vec::new();
    for (i, row) in r.records().enumerate() {
        let row = row.map_err(|e| CliError::Parse {
            line: i + 2,
            message: e.to_string(),
        })?;
        out.push(ExperimentRecord::from_fields(&row, i + 2)?);
    }
    Ok(out)
}
