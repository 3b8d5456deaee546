//! Ratio trends along an increasing `n` ladder.

use std::fmt::Write as _;

use crate::config::{Conjecture, ExperimentConfig, GridPoint, DEFAULT_IP_NODE_LIMIT};
use crate::record::{fmt_sig, ExperimentRecord};
use crate::report::{group_points, median_iqr};
use crate::sweep::run_sweep;
use crate::{CliError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ConjectureRow {
    pub n: usize,
    pub m: usize,
    pub p: f64,
    pub trials: usize,
    /// Trials where the ratio was defined.
    pub defined: usize,
    pub median: Option<f64>,
    pub iqr: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConjectureTable {
    pub regime: Conjecture,
    pub rows: Vec<ConjectureRow>,
    pub records: Vec<ExperimentRecord>,
}

fn ratio(c: Conjecture, r: &ExperimentRecord) -> Option<f64> {
    let ip = r.optimal_ip().map(|v| v as f64);
    match c {
        Conjecture::VerySparse => r.ratio_gr_lp(),
        Conjecture::Sparse => ip.zip(r.val_lp).map(|(i, l)| i / l),
        Conjecture::Dense => r.val_gr.zip(ip).map(|(g, i)| g as f64 / i),
    }
}

/// The sweep config a probe runs: one grid point per ladder rung, with the
/// solvers the ratio needs switched on.
pub fn probe_config(cfg: &ExperimentConfig) -> Result<(Conjecture, ExperimentConfig)> {
    let c = cfg
        .conjecture
        .ok_or_else(|| CliError::config("conjecture regime not set"))?;
    let (Some(m), Some(p)) = (cfg.ladder_m, cfg.ladder_p) else {
        return Err(CliError::config("ladder_m and ladder_p are required"));
    };
    if cfg.ladder.is_empty() {
        return Err(CliError::config("empty ladder"));
    }
    if cfg.ladder.windows(2).any(|w| w[0] >= w[1]) {
        return Err(CliError::config("ladder must be increasing"));
    }
    let mut run = cfg.clone();
    run.grid = cfg.ladder.iter().map(|&n| GridPoint { n, m, p }).collect();
    let s = &mut run.solvers;
    match c {
        Conjecture::VerySparse => {
            s.greedy = true;
            s.lp = true;
        }
        Conjecture::Sparse | Conjecture::Dense => {
            if !s.has_ip() {
                s.ip_exact = Some(DEFAULT_IP_NODE_LIMIT);
            }
            if c == Conjecture::Sparse {
                s.lp = true;
            } else {
                s.greedy = true;
            }
        }
    }
    Ok((c, run))
}

pub fn conjecture_probe(cfg: &ExperimentConfig) -> Result<ConjectureTable> {
    let (c, run) = probe_config(cfg)?;
    let records = run_sweep(&run)?;
    let rows = group_points(&records)
        .into_iter()
        .map(|g| {
            let vals: Vec<f64> = g.iter().filter_map(|r| ratio(c, r)).collect();
            let st = median_iqr(&vals);
            ConjectureRow {
                n: g[0].n,
                m: g[0].m,
                p: g[0].p,
                trials: g.len(),
                defined: vals.len(),
                median: st.map(|s| s.0),
                iqr: st.map(|s| s.1),
            }
        })
        .collect();
    Ok(ConjectureTable {
        regime: c,
        rows,
        records,
    })
}

impl ConjectureTable {
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "# {} ladder, median {}\n{:>8} {:>8} {:>12} {:>6} {:>7} {:>12} {:>12}\n",
            self.regime.as_str(),
            self.regime.ratio_name(),
            "n",
            "m",
            "p",
            "trials",
            "defined",
            "median",
            "iqr"
        );
        let show = |v: Option<f64>| v.map(fmt_sig).unwrap_or_else(|| "-".into());
        for r in &self.rows {
            writeln!(
                out,
                "{:>8} {:>8} {:>12} {:>6} {:>7} {:>12} {:>12}",
                r.n,
                r.m,
                fmt_sig(r.p),
                r.trials,
                r.defined,
                show(r.median),
                show(r.iqr)
            )
            .unwrap();
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ladder(text: &str) -> ExperimentConfig {
        ExperimentConfig::from_text(text).unwrap()
    }

    #[test]
    fn single_rung() {
        let cfg = ladder("conjecture = very_sparse\nladder = 300\nladder_m = n^0.3\nladder_p = 0.1/m\ntrials = 3\nsolvers = greedy");
        let t = conjecture_probe(&cfg).unwrap();
        assert_eq!(t.rows.len(), 1);
        let row = &t.rows[0];
        assert_eq!((row.n, row.m, row.trials), (300, 5, 3));
        assert!((row.p - 0.02).abs() < 1e-15);
        assert!(t.to_text().contains("val_gr/val_lp"));
    }

    #[test]
    fn sparse_ladder_fills_ip_ratio() {
        let cfg = ladder(
            "conjecture = sparse\nladder = 12, 16, 20\nladder_m = n\nladder_p = 0.3\ntrials = 4\nsolvers = ip_bruteforce",
        );
        let t = conjecture_probe(&cfg).unwrap();
        assert_eq!(t.rows.len(), 3);
        for r in &t.rows {
            assert!(r.defined > 0, "{r:?}");
            assert!(r.median.unwrap() >= 1.0 - 1e-9);
        }
    }

    #[test]
    fn rejects_bad_ladders() {
        assert!(probe_config(&ladder("ladder = 5\nladder_m = 5\nladder_p = 0.1")).is_err());
        assert!(probe_config(&ladder("conjecture = dense\nladder = 20, 10\nladder_m = 5\nladder_p = 0.1")).is_err());
        assert!(probe_config(&ladder("conjecture = dense\nladder = 10")).is_err());
    }
}
