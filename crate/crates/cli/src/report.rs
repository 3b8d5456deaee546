//! Summaries of sweep records.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::record::{fmt_sig, read_records, ExperimentRecord};
use crate::{CliError, Result};

/// Linear-interpolation quantile of sorted data.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Median and interquartile range; `None` for no data.
pub fn median_iqr(values: &[f64]) -> Option<(f64, f64)> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    Some((quantile(&v, 0.5), quantile(&v, 0.75) - quantile(&v, 0.25)))
}

pub fn median(values: &[f64]) -> Option<f64> {
    median_iqr(values).map(|(m, _)| m)
}

type Metric = (&'static str, fn(&ExperimentRecord) -> Option<f64>);

/// Ratios summarised per grid point, in column order.
pub const METRICS: [Metric; 5] = [
    ("gap_ip_lp", |r| r.gap_ip_lp),
    ("gap_gr_ip", |r| r.gap_gr_ip),
    ("gap_bgr_ip", |r| r.gap_bgr_ip),
    ("gr_lp", ExperimentRecord::ratio_gr_lp),
    ("bgr_lp", ExperimentRecord::ratio_bgr_lp),
];

#[derive(Debug, Clone, PartialEq)]
pub struct PointSummary {
    pub n: usize,
    pub m: usize,
    pub p: f64,
    pub regime: String,
    pub trials: usize,
    pub errors: usize,
    pub fallbacks: usize,
    /// `(median, iqr)` per entry of [`METRICS`].
    pub stats: Vec<Option<(f64, f64)>>,
}

impl PointSummary {
    pub fn stat(&self, metric: &str) -> Option<(f64, f64)> {
        let i = METRICS.iter().position(|(name, _)| *name == metric)?;
        self.stats[i]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GapSummary {
    pub points: Vec<PointSummary>,
}

/// Groups records by `(n, m, p)` in order of first appearance.
pub fn group_points(records: &[ExperimentRecord]) -> Vec<Vec<&ExperimentRecord>> {
    let mut groups: Vec<Vec<&ExperimentRecord>> = Vec::new();
    for r in records {
        match groups
            .iter_mut()
            .find(|g| (g[0].n, g[0].m, g[0].p) == (r.n, r.m, r.p))
        {
            Some(g) => g.push(r),
            None => groups.push(vec![r]),
        }
    }
    groups
}

pub fn summarise(records: &[ExperimentRecord]) -> Result<GapSummary> {
    if records.is_empty() {
        return Err(CliError::EmptyInput);
    }
    let points = group_points(records)
        .into_iter()
        .map(|g| {
            let stats = METRICS
                .iter()
                .map(|(_, f)| median_iqr(&g.iter().filter_map(|r| f(r)).collect::<Vec<_>>()))
                .collect();
            PointSummary {
                n: g[0].n,
                m: g[0].m,
                p: g[0].p,
                regime: g[0].regime.clone(),
                trials: g.len(),
                errors: g.iter().filter(|r| r.error.is_some()).count(),
                fallbacks: g.iter().filter(|r| r.trivial_fallback == Some(true)).count(),
                stats,
            }
        })
        .collect();
    Ok(GapSummary { points })
}

/// Reads a sweep CSV and summarises it per grid point.
pub fn gap_report(records_path: impl AsRef<Path>) -> Result<GapSummary> {
    let file = File::open(records_path)?;
    summarise(&read_records(file)?)
}

impl GapSummary {
    pub fn header() -> Vec<String> {
        let mut h: Vec<String> = ["n", "m", "p", "regime", "trials", "errors", "fallbacks"]
            .map(String::from)
            .to_vec();
        for (name, _) in METRICS {
            h.push(format!("median_{name}"));
            h.push(format!("iqr_{name}"));
        }
        h
    }

    fn rows(&self) -> Vec<Vec<String>> {
        self.points
            .iter()
            .map(|s| {
                let mut row = vec![
                    s.n.to_string(),
                    s.m.to_string(),
                    fmt_sig(s.p),
                    s.regime.clone(),
                    s.trials.to_string(),
                    s.errors.to_string(),
                    s.fallbacks.to_string(),
                ];
                for st in &s.stats {
                    match st {
                        Some((med, iqr)) => {
                            row.push(fmt_sig(*med));
                            row.push(fmt_sig(*iqr));
                        }
                        None => row.extend([String::new(), String::new()]),
                    }
                }
                row
            })
            .collect()
    }

    pub fn write_csv(&self, out: impl Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(Self::header())?;
        for row in self.rows() {
            w.write_record(row)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Aligned table; absent values print as `-`.
    pub fn to_text(&self) -> String {
        let header = Self::header();
        let rows: Vec<Vec<String>> = self
            .rows()
            .into_iter()
            .map(|r| {
                r.into_iter()
                    .map(|c| if c.is_empty() { "-".to_owned() } else { c })
                    .collect()
            })
            .collect();
        let widths: Vec<usize> = (0..header.len())
            .map(|i| rows.iter().map(|r| r[i].len()).chain([header[i].len()]).max().unwrap())
            .collect();
        let mut out = String::new();
        for row in std::iter::once(&header).chain(&rows) {
            let cells: Vec<String> = row
                .iter()
                .zip(&widths)
                .map(|(c, w)| format!("{c:>w$}"))
                .collect();
            writeln!(out, "{}", cells.join("  ").trim_end()).unwrap();
        }
        out
    }
}

/// Plot exponents `(b, d)` with `m = n^b`, `p = n^{−d}`.
pub fn exponents(n: usize, m: usize, p: f64) -> Option<(f64, f64)> {
    if n < 2 || m == 0 || !(p > 0.0) {
        return None;
    }
    let ln = (n as f64).ln();
    Some(((m as f64).ln() / ln, -p.ln() / ln))
}

/// Path of the separatrix file written next to `out_path`.
pub fn separatrix_path(out_path: &Path) -> PathBuf {
    let mut s = out_path.as_os_str().to_owned();
    s.push(".separatrix");
    PathBuf::from(s)
}

/// Writes `b d gap` rows, one per grid point, to `out_path` and the
/// `mp = log n` curve for every `n` present to `out_path.separatrix`.
///
/// The gap is the median `val_ip/val_lp` when any record has it, else the
/// median `val_bgr/val_lp`, else `val_gr/val_lp`. Points without the chosen
/// ratio get `nan`.
pub fn emit_plot_data(records_path: impl AsRef<Path>, out_path: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let records = read_records(File::open(records_path)?)?;
    let out_path = out_path.as_ref();
    write_plot_data(&records, out_path)?;
    let sep = separatrix_path(out_path);
    write_separatrix(&records, &sep)?;
    Ok(vec![out_path.to_path_buf(), sep])
}

fn write_plot_data(records: &[ExperimentRecord], path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "# b d gap")?;
    let chosen = [
        ("val_ip/val_lp", METRICS[0].1),
        ("val_bgr/val_lp", METRICS[4].1),
        ("val_gr/val_lp", METRICS[3].1),
    ]
    .into_iter()
    .find(|(_, f)| records.iter().any(|r| f(r).is_some()));
    if let Some((name, f)) = chosen {
        writeln!(w, "# gap = median {name}")?;
        for g in group_points(records) {
            let Some((b, d)) = exponents(g[0].n, g[0].m, g[0].p) else {
                continue;
            };
            let gap = median(&g.iter().filter_map(|r| f(r)).collect::<Vec<_>>());
            let gap = gap.map(fmt_sig).unwrap_or_else(|| "nan".into());
            writeln!(w, "{} {} {gap}", fmt_sig(b), fmt_sig(d))?;
        }
    }
    w.flush()?;
    Ok(())
}

/// `mp = log n` is `d = b − log log n / log n` in exponent coordinates.
fn write_separatrix(records: &[ExperimentRecord], path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "# n b d")?;
    let mut ns: Vec<usize> = records.iter().map(|r| r.n).filter(|&n| n >= 3).collect();
    ns.sort_unstable();
    ns.dedup();
    for n in ns {
        let ln = (n as f64).ln();
        let shift = ln.ln() / ln;
        for i in 0..=40 {
            let b = i as f64 * 0.05;
            let d = b - shift;
            if d >= 0.0 {
                writeln!(w, "{n} {} {}", fmt_sig(b), fmt_sig(d))?;
            }
        }
    }
    w.flush()?;
    Ok(())
}
