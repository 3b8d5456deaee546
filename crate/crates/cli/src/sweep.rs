//! Parameter sweeps.

use std::time::Instant;

use randhs_core::{
    block_greedy, block_greedy_best_of, build_schedule, classify_regime, derive_seed, generate,
    greedy, lp_lower_bound, solve_ip_bruteforce, solve_ip_exact_with, solve_lp_with,
    uniform_upper_bound, CoverSolution, HsInstance, IpOptions, LpOptions, LpStatus,
};
use rayon::prelude::*;

use crate::config::{ExperimentConfig, GridPoint, IP_AUTO_MAX_N};
use crate::record::ExperimentRecord;
use crate::{CliError, Result};

/// Seed of trial `t` at grid point `point`: `derive_seed(base, &[point, t])`.
pub fn trial_seed(base: u64, point: usize, t: usize) -> u64 {
    derive_seed(base, &[point as u64, t as u64])
}

/// Runs every `(point, trial)` of `cfg` on fresh random instances.
///
/// Records come back ordered by `(point, trial)` whatever the parallelism.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<Vec<ExperimentRecord>> {
    run_sweep_with(cfg, |_, n, m, p, seed| Ok(generate(n, m, p, seed)?))
}

/// [`run_sweep`] with a custom instance source `(point, n, m, p, seed)`.
pub fn run_sweep_with<F>(cfg: &ExperimentConfig, source: F) -> Result<Vec<ExperimentRecord>>
where
    F: Fn(usize, usize, usize, f64, u64) -> Result<HsInstance> + Sync,
{
    cfg.validate()?;
    let tasks: Vec<(usize, GridPoint, usize)> = cfg
        .grid
        .iter()
        .enumerate()
        .flat_map(|(i, g)| (0..cfg.trials).map(move |t| (i, *g, t)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.parallelism)
        .build()
        .map_err(|e| CliError::config(format!("cannot start worker pool: {e}")))?;
    let records: Vec<ExperimentRecord> = pool.install(|| {
        tasks
            .par_iter()
            .map(|&(i, g, t)| {
                let (n, m, p) = g.resolve();
                let seed = trial_seed(cfg.base_seed, i, t);
                match source(i, n, m, p, seed) {
                    Ok(inst) => run_trial(cfg, &inst, p, seed),
                    Err(e) => {
                        let mut r = ExperimentRecord::new(n, m, p, seed);
                        r.push_error(format!("generate: {e}"));
                        r
                    }
                }
            })
            .collect()
    });
    for r in &records {
        r.audit().map_err(CliError::Audit)?;
    }
    Ok(records)
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, f64) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed().as_secs_f64() * 1e3)
}

/// Runs the enabled solvers on one instance.
pub fn run_trial(cfg: &ExperimentConfig, inst: &HsInstance, p: f64, seed: u64) -> ExperimentRecord {
    let (n, m) = (inst.n(), inst.m());
    let s = &cfg.solvers;
    let keep = |ms: f64| cfg.timings.then_some(ms);
    let mut r = ExperimentRecord::new(n, m, p, seed);
    if let Ok(label) = classify_regime(n, m, p, &cfg.thresholds) {
        r.regime = label.regime.as_str().to_owned();
    }
    r.dmax = inst.dmax();
    r.lp_lb = lp_lower_bound(inst).ok();
    if s.lp_bounds {
        match uniform_upper_bound(inst, Some(p), cfg.c_tilde) {
            Ok(ub) => r.lp_ub_uniform = ub,
            Err(e) => r.push_error(format!("lp_bounds: {e}")),
        }
    }
    if let Some(row) = inst.empty_row() {
        r.push_error(format!("infeasible: row {row} is empty"));
        return r;
    }

    if s.greedy {
        let (res, ms) = timed(|| greedy(inst));
        match res {
            Ok(sol) => {
                r.val_gr = Some(sol.value);
                r.rt_gr_ms = keep(ms);
            }
            Err(e) => r.push_error(format!("greedy: {e}")),
        }
    }

    if s.block_greedy || s.best_of.is_some() {
        let bseed = derive_seed(seed, &[1]);
        let (res, ms) = timed(|| -> randhs_core::Result<(CoverSolution, usize)> {
            let sched = build_schedule(n, m, p, cfg.schedule_epsilon, None)?;
            let sol = match s.best_of {
                Some(j) => block_greedy_best_of(inst, &sched, j, bseed)?,
                None => block_greedy(inst, &sched, bseed)?,
            };
            Ok((sol, sched.k_blocks))
        });
        match res {
            Ok((sol, k)) => {
                r.val_bgr = Some(sol.value);
                r.k_blocks = Some(k);
                r.trivial_fallback = Some(sol.used_trivial_fallback);
                r.rt_bgr_ms = keep(ms);
            }
            Err(e) => r.push_error(format!("block_greedy: {e}")),
        }
    }

    if s.lp {
        let opts = LpOptions {
            allow_large: cfg.force_large,
            ..LpOptions::default()
        };
        let (res, ms) = timed(|| solve_lp_with(inst, &opts));
        match res {
            Ok(sol) if sol.status == LpStatus::Optimal => {
                r.val_lp = Some(sol.value);
                r.rt_lp_ms = keep(ms);
            }
            Ok(sol) => r.push_error(format!("lp: {:?}", sol.status)),
            Err(e) => r.push_error(format!("lp: {e}")),
        }
    }

    let mut ip_ms = 0.0;
    if let Some(node_limit) = s.ip_exact {
        if n <= IP_AUTO_MAX_N || cfg.force_large {
            let opts = IpOptions {
                node_limit,
                node_lp: false,
            };
            let (res, ms) = timed(|| solve_ip_exact_with(inst, &opts));
            ip_ms += ms;
            match res {
                Ok(ip) => {
                    r.val_ip = Some(ip.solution.value);
                    r.ip_optimal = Some(ip.optimal);
                }
                Err(e) => r.push_error(format!("ip_exact: {e}")),
            }
        }
    }
    if s.ip_bruteforce {
        let (res, ms) = timed(|| solve_ip_bruteforce(inst));
        ip_ms += ms;
        match res {
            Ok(ip) => match r.optimal_ip() {
                Some(v) if v != ip.solution.value => r.push_error(format!(
                    "ip mismatch: branch and bound {v}, brute force {}",
                    ip.solution.value
                )),
                _ => {
                    r.val_ip = Some(ip.solution.value);
                    r.ip_optimal = Some(true);
                }
            },
            Err(e) => r.push_error(format!("ip_bruteforce: {e}")),
        }
    }
    if r.val_ip.is_some() {
        r.rt_ip_ms = keep(ip_ms);
    }

    r.compute_gaps();
    r
}
