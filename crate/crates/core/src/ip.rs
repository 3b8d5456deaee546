//! Exact integer optimum of `min ‖x‖₁ s.t. Ax ≥ 1, x ∈ {0,1}ⁿ`, a
//! brute-force oracle for tiny instances, and first-moment quantities.

use statrs::function::factorial::ln_binomial;

use crate::bitset::BitSet;
use crate::error::{HsError, Result};
use crate::greedy::{greedy, Algorithm, CoverSolution};
use crate::instance::HsInstance;
use crate::lp::{solve_lp_with, LpOptions, LpStatus};
use crate::theory::lambert_w0;

/// Largest `n` accepted by the enumeration routines.
pub const BRUTE_FORCE_MAX_N: usize = 26;
pub const DEFAULT_NODE_LIMIT: usize = 2_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundKind {
    LpRelaxation,
    MOverDmax,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IpResult {
    pub solution: CoverSolution,
    pub optimal: bool,
    pub nodes_explored: usize,
    pub bound_used: BoundKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IpOptions {
    pub node_limit: usize,
    /// Also bound each node by its LP relaxation.
    pub node_lp: bool,
}

impl Default for IpOptions {
    fn default() -> Self {
        IpOptions {
            node_limit: DEFAULT_NODE_LIMIT,
            node_lp: false,
        }
    }
}

/// Replays `chosen` to build the gain trace.
fn cover_from(inst: &HsInstance, chosen: Vec<usize>, algorithm: Algorithm) -> CoverSolution {
    let mut unhit = BitSet::full(inst.m());
    let mut gains = Vec::with_capacity(chosen.len());
    let mut covered_after = Vec::with_capacity(chosen.len());
    for &j in &chosen {
        gains.push(inst.col(j).intersection_count(&unhit));
        unhit.difference_with(inst.col(j));
        covered_after.push(inst.m() - unhit.count());
    }
    CoverSolution {
        value: chosen.len(),
        chosen,
        gains,
        covered_after,
        used_trivial_fallback: false,
        algorithm,
    }
}

pub fn solve_ip_exact(inst: &HsInstance, node_limit: usize) -> Result<IpResult> {
    solve_ip_exact_with(
        inst,
        &IpOptions {
            node_limit,
            node_lp: false,
        },
    )
}

struct Bnb<'a> {
    inst: &'a HsInstance,
    opts: IpOptions,
    best: Vec<usize>,
    chosen: Vec<usize>,
    nodes: usize,
    aborted: bool,
}

impl Bnb<'_> {
    fn node(&mut self, unhit: &BitSet, avail: &mut BitSet) {
        if self.nodes >= self.opts.node_limit {
            self.aborted = true;
            return;
        }
        self.nodes += 1;
        if unhit.is_empty() {
            if self.chosen.len() < self.best.len() {
                self.best = self.chosen.clone();
            }
            return;
        }
        if unhit.iter().any(|i| !self.inst.row(i).intersects(avail)) {
            return;
        }
        let mut branch = (usize::MAX, 0usize);
        for j in avail.iter() {
            let g = self.inst.col(j).intersection_count(unhit);
            if g > branch.1 {
                branch = (j, g);
            }
        }
        let residual_m = unhit.count();
        let mut lb = self.chosen.len() + residual_m.div_ceil(branch.1);
        if lb >= self.best.len() {
            return;
        }
        if self.opts.node_lp {
            if let Some(v) = self.node_lp_bound(unhit, avail) {
                lb = lb.max(self.chosen.len() + (v - 1e-6).ceil().max(0.0) as usize);
                if lb >= self.best.len() {
                    return;
                }
            }
        }
        let j = branch.0;
        avail.remove(j);
        self.chosen.push(j);
        let mut rest = unhit.clone();
        rest.difference_with(self.inst.col(j));
        self.node(&rest, avail);
        self.chosen.pop();
        if !self.aborted {
            self.node(unhit, avail);
        }
        avail.insert(j);
    }

    fn node_lp_bound(&self, unhit: &BitSet, avail: &BitSet) -> Option<f64> {
        let cols: Vec<usize> = avail.iter().collect();
        let rows: Vec<BitSet> = unhit
            .iter()
            .map(|i| {
                let r = self.inst.row(i);
                BitSet::from_indices(cols.len(), (0..cols.len()).filter(|&c| r.contains(cols[c])))
            })
            .collect();
        let sub = HsInstance::from_rows(cols.len(), rows).ok()?;
        let s = solve_lp_with(&sub, &LpOptions::default()).ok()?;
        (s.status == LpStatus::Optimal).then_some(s.value)
    }
}

/// Depth-first branch and bound seeded with the greedy cover.
///
/// Branches on the available column hitting the most unhit rows (lowest
/// index on ties), include branch first. Each node is bounded by
/// `|chosen| + ⌈unhit / max gain⌉`, and optionally by its LP relaxation.
pub fn solve_ip_exact_with(inst: &HsInstance, opts: &IpOptions) -> Result<IpResult> {
    if let Some(row) = inst.empty_row() {
        return Err(HsError::Infeasible { row });
    }
    let incumbent = greedy(inst)?;
    let mut bnb = Bnb {
        inst,
        opts: *opts,
        best: incumbent.chosen,
        chosen: Vec::new(),
        nodes: 0,
        aborted: false,
    };
    let mut avail = BitSet::full(inst.n());
    bnb.node(&BitSet::full(inst.m()), &mut avail);
    let mut best = bnb.best;
    best.sort_unstable();
    Ok(IpResult {
        solution: cover_from(inst, best, Algorithm::ExactIp),
        optimal: !bnb.aborted,
        nodes_explored: bnb.nodes,
        bound_used: if opts.node_lp {
            BoundKind::LpRelaxation
        } else {
            BoundKind::MOverDmax
        },
    })
}

fn guard_n(inst: &HsInstance) -> Result<()> {
    if inst.n() > BRUTE_FORCE_MAX_N {
        return Err(HsError::TooLarge {
            n: inst.n(),
            limit: BRUTE_FORCE_MAX_N,
        });
    }
    Ok(())
}

/// Row masks over the columns.
fn row_masks(inst: &HsInstance) -> Vec<u32> {
    inst.rows()
        .iter()
        .map(|r| r.iter().fold(0u32, |acc, j| acc | 1 << j))
        .collect()
}

/// Calls `f` on every `k`-subset of `0..n` in lexicographic order until it
/// returns `false`.
fn for_each_subset(n: usize, k: usize, mut f: impl FnMut(&[usize], u32) -> bool) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        let mask = idx.iter().fold(0u32, |acc, &j| acc | 1 << j);
        if !f(&idx, mask) {
            return;
        }
        let Some(pos) = (0..k).rev().find(|&p| idx[p] < n - k + p) else {
            return;
        };
        idx[pos] += 1;
        for q in pos + 1..k {
            idx[q] = idx[q - 1] + 1;
        }
    }
}

/// Exhaustive search by increasing cardinality; the first hitting set in
/// lexicographic order wins.
pub fn solve_ip_bruteforce(inst: &HsInstance) -> Result<IpResult> {
    guard_n(inst)?;
    if let Some(row) = inst.empty_row() {
        return Err(HsError::Infeasible { row });
    }
    let masks = row_masks(inst);
    let mut nodes = 0usize;
    for k in 0..=inst.n() {
        let mut found = None;
        for_each_subset(inst.n(), k, |idx, mask| {
            nodes += 1;
            if masks.iter().all(|&r| r & mask != 0) {
                found = Some(idx.to_vec());
                false
            } else {
                true
            }
        });
        if let Some(chosen) = found {
            return Ok(IpResult {
                solution: cover_from(inst, chosen, Algorithm::BruteForce),
                optimal: true,
                nodes_explored: nodes,
                bound_used: BoundKind::MOverDmax,
            });
        }
    }
    unreachable!("all columns together hit every nonempty row")
}

/// Number of `k`-subsets of columns that are hitting sets (`Z_k`).
pub fn count_feasible_k(inst: &HsInstance, k: usize) -> Result<u64> {
    guard_n(inst)?;
    let masks = row_masks(inst);
    let mut count = 0u64;
    for_each_subset(inst.n(), k, |_, mask| {
        if masks.iter().all(|&r| r & mask != 0) {
            count += 1;
        }
        true
    });
    Ok(count)
}

/// `log E[Z_k] = log C(n,k) + m·log(1 − (1−p)^k)`.
pub fn expected_zk_log(n: usize, m: usize, p: f64, k: usize) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(HsError::InvalidProbability(p));
    }
    if k > n {
        return Err(HsError::InvalidArgument(format!("k = {k} exceeds n = {n}")));
    }
    let log_c = ln_binomial(n as u64, k as u64);
    if m == 0 {
        return Ok(log_c);
    }
    if k == 0 || p == 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    let hit = -(k as f64 * (-p).ln_1p()).exp_m1();
    Ok(log_c + m as f64 * hit.ln())
}

#[derive(Debug, Clone, PartialEq)]
pub struct FirstMomentReport {
    /// `⌈k_*⌉`, capped at `n`.
    pub k: usize,
    /// `log E[Z_k]` at `k`.
    pub log_expected_zk: f64,
    /// `k_* = W0(mp / (D log n)) / (2p)`.
    pub k_star_lower: f64,
    /// `k* = log(mp / (δ log n)) / p`.
    pub k_star_upper: f64,
    pub d: f64,
    pub delta: f64,
    /// `mp / (D log n) ≥ e`, the range where the `log x − log log x`
    /// bracket on `W0` applies.
    pub w0_bracket_applies: bool,
}

pub fn first_moment_thresholds(n: usize, m: usize, p: f64, d: f64, delta: f64) -> Result<FirstMomentReport> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(HsError::InvalidProbability(p));
    }
    if !(d >= 1.0) {
        return Err(HsError::InvalidArgument(format!("D must be >= 1, got {d}")));
    }
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(HsError::InvalidArgument(format!(
            "delta must lie in (0,1], got {delta}"
        )));
    }
    if n < 2 {
        return Err(HsError::InvalidArgument("n must be at least 2".into()));
    }
    let mp = m as f64 * p;
    let log_n = (n as f64).ln();
    if mp <= log_n {
        return Err(HsError::RegimeViolation(format!(
            "first-moment thresholds need mp > log n (mp = {mp}, log n = {log_n})"
        )));
    }
    let x = mp / (d * log_n);
    let k_star_lower = lambert_w0(x)? / (2.0 * p);
    let k_star_upper = (mp / (delta * log_n)).ln() / p;
    let k = (k_star_lower.ceil() as usize).clamp(0, n);
    Ok(FirstMomentReport {
        k,
        log_expected_zk: expected_zk_log(n, m, p, k)?,
        k_star_lower,
        k_star_upper,
        d,
        delta,
        w0_bracket_applies: x >= std::f64::consts::E,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::generate;

    #[test]
    fn exact_examples() {
        let r = solve_ip_exact(&HsInstance::identity(3), 1000).unwrap();
        assert_eq!(r.solution.value, 3);
        assert!(r.optimal);
        let r = solve_ip_exact(&HsInstance::circulant(5, 2), 1000).unwrap();
        assert_eq!(r.solution.value, 3);
        assert_eq!(r.solution.algorithm, Algorithm::ExactIp);
    }

    #[test]
    fn bruteforce_examples() {
        assert_eq!(solve_ip_bruteforce(&HsInstance::identity(3)).unwrap().solution.value, 3);
        assert_eq!(solve_ip_bruteforce(&HsInstance::all_ones(4, 6)).unwrap().solution.value, 1);
        let r = solve_ip_bruteforce(&HsInstance::circulant(6, 2)).unwrap();
        assert_eq!(r.solution.chosen, vec![0, 2, 4]);
        assert!(matches!(
            solve_ip_bruteforce(&HsInstance::identity(27)),
            Err(HsError::TooLarge { n: 27, limit: 26 })
        ));
    }

    #[test]
    fn golden_exact_matches_oracle() {
        let inst = generate(20, 25, 0.25, 9).unwrap();
        if inst.empty_row().is_none() {
            let a = solve_ip_exact(&inst, DEFAULT_NODE_LIMIT).unwrap();
            let b = solve_ip_bruteforce(&inst).unwrap();
            assert!(a.optimal);
            assert_eq!(a.solution.value, b.solution.value);
        }
    }

    #[test]
    fn node_lp_bound_agrees() {
        for seed in 0..5 {
            let inst = generate(14, 18, 0.3, seed).unwrap();
            if inst.empty_row().is_some() {
                continue;
            }
            let opts = IpOptions {
                node_limit: DEFAULT_NODE_LIMIT,
                node_lp: true,
            };
            let a = solve_ip_exact_with(&inst, &opts).unwrap();
            assert_eq!(a.bound_used, BoundKind::LpRelaxation);
            assert_eq!(a.solution.value, solve_ip_bruteforce(&inst).unwrap().solution.value);
        }
    }

    #[test]
    fn node_limit_reports_incumbent() {
        let inst = generate(24, 30, 0.2, 1).unwrap();
        if inst.empty_row().is_none() {
            let r = solve_ip_exact(&inst, 1).unwrap();
            assert!(!r.optimal);
            assert!(inst.is_hitting_set(&r.solution.chosen).unwrap());
        }
    }

    #[test]
    fn counting_examples() {
        let id = HsInstance::identity(3);
        assert_eq!(count_feasible_k(&id, 3).unwrap(), 1);
        assert_eq!(count_feasible_k(&id, 2).unwrap(), 0);
        assert_eq!(count_feasible_k(&HsInstance::all_ones(1, 4), 1).unwrap(), 4);
        assert_eq!(count_feasible_k(&HsInstance::circulant(6, 2), 3).unwrap(), 2);
        assert_eq!(count_feasible_k(&id, 4).unwrap(), 0);
    }

    #[test]
    fn expected_zk_examples() {
        assert_eq!(expected_zk_log(10, 3, 0.5, 0).unwrap(), f64::NEG_INFINITY);
        let v = expected_zk_log(10, 5, 0.5, 2).unwrap();
        assert!((v - (45.0 * 0.75f64.powi(5)).ln()).abs() < 1e-12);
        assert!(expected_zk_log(7, 4, 1.0, 7).unwrap().abs() < 1e-12);
        assert!(expected_zk_log(7, 4, 1.5, 7).is_err());
        assert_eq!(expected_zk_log(7, 4, 0.0, 3).unwrap(), f64::NEG_INFINITY);
    }

    #[test]
    fn first_moment_examples() {
        let r = first_moment_thresholds(1000, 100_000, 0.01, 1.0, 0.5).unwrap();
        let x: f64 = 1000.0 / 1000f64.ln();
        let w = lambert_w0(x).unwrap();
        assert!((r.k_star_lower - 50.0 * w).abs() < 1e-9);
        assert!(r.k_star_lower <= r.k_star_upper);
        assert!(r.w0_bracket_applies);

        let r1 = first_moment_thresholds(1000, 100_000, 0.01, 1.0, 1.0).unwrap();
        assert!((r1.k_star_upper - 100.0 * x.ln()).abs() < 1e-9);

        // mp / log n = e exactly
        let n = 1000usize;
        let p = 0.01;
        let m = 3000;
        let d = m as f64 * p / ((n as f64).ln() * std::f64::consts::E);
        let r = first_moment_thresholds(n, m, p, d, 0.5).unwrap();
        assert!((r.k_star_lower - 1.0 / (2.0 * p)).abs() < 1e-6);

        assert!(matches!(
            first_moment_thresholds(1000, 100, 0.01, 1.0, 0.5),
            Err(HsError::RegimeViolation(_))
        ));
        let r = first_moment_thresholds(1000, 1000, 0.01, 1.0, 0.5).unwrap();
        assert!(!r.w0_bracket_applies);
    }
}
