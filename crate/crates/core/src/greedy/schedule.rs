//! Target-gain schedules `f_1, f_2, …` for block-greedy and the block count `K`.
//!
//! Three constructions, selected by regime:
//!
//! * sparse / threshold: geometric buckets. While the number of unhit rows
//!   `R = m − F_{t−1}` lies in `(β^{−k−1} m, β^{−k} m]`, the target is
//!   `⌈(α/β)^k · τ · E[dmax]⌉`;
//! * dense, not polynomially dense: `⌈mp(1−p)^{t−1}⌉` up to the switch time
//!   `t* = ⌈(1/p) log(mp / log n)⌉`, then the bucket schedule on the residual rows;
//! * polynomially dense: `⌈mp(1−p)^{t−1}⌉` throughout.
//!
//! `K̃` is the first `t` with `F_t ≥ m − t`, and `K = min(2K̃, n)`.

use crate::error::{HsError, Result};
use crate::instance::{classify_regime, Regime, RegimeThresholds};
use crate::theory::expected_dmax_estimate;

pub const DEFAULT_EPSILON: f64 = 0.25;
pub const SPARSE_ALPHA: f64 = 2.0;
pub const SPARSE_BETA: f64 = 3.0;
pub const THRESHOLD_ALPHA: f64 = 1.1;
pub const THRESHOLD_BETA: f64 = 1.2;
pub const THRESHOLD_GAMMA: f64 = 1.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScheduleCase {
    SparseOrThreshold,
    DenseSwitch,
    PolyDense,
}

/// Optional replacements for the default schedule constants.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ScheduleOverrides {
    pub tau: Option<f64>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub gamma: Option<f64>,
    pub thresholds: Option<RegimeThresholds>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScheduleParams {
    /// `τ` of the bucket schedule in force from the first bucket step on.
    pub tau: f64,
    pub alpha: f64,
    pub beta: f64,
    /// Only used by the threshold sub-case, where `τ = γ·mp / E[dmax]`.
    pub gamma: f64,
    pub epsilon: f64,
    /// Switch time of the dense schedule.
    pub t_star: Option<usize>,
    pub edmax_estimate: f64,
}

/// Constants of one geometric-bucket schedule.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Buckets {
    /// Rows the bucket boundaries `β^{−k} m_base` refer to.
    m_base: usize,
    alpha: f64,
    beta: f64,
    /// `τ · E[dmax]`.
    scale: f64,
}

impl Buckets {
    fn term(&self, remaining: usize) -> usize {
        if remaining == 0 {
            return 1;
        }
        let r = remaining as f64;
        let m = self.m_base as f64;
        let mut k = 0i32;
        while r <= m * self.beta.powi(-(k + 1)) {
            k += 1;
        }
        let f = ((self.alpha / self.beta).powi(k) * self.scale).ceil() as usize;
        f.clamp(1, remaining)
    }
}

/// Lazily evaluated target gains.
#[derive(Debug, Clone, PartialEq)]
pub struct ScheduleTerms {
    m: usize,
    n: usize,
    p: f64,
    mp: f64,
    t: usize,
    covered: usize,
    plan: Plan,
    overrides: ScheduleOverrides,
    epsilon: f64,
}

#[derive(Debug, Clone, PartialEq)]
enum Plan {
    Buckets(Buckets),
    Geometric,
    Switch {
        t_star: usize,
        after: Option<Buckets>,
    },
}

fn bucket_constants(
    n: usize,
    m: usize,
    p: f64,
    epsilon: f64,
    ov: &ScheduleOverrides,
) -> Result<(Buckets, ScheduleParams)> {
    let thresholds = ov.thresholds.unwrap_or_default();
    let est = expected_dmax_estimate(n, m.max(1), p, &thresholds)?;
    let mp = m as f64 * p;
    let gamma = ov.gamma.unwrap_or(THRESHOLD_GAMMA);
    let (alpha, beta, tau) = if est.regime.regime == Regime::Sparse {
        (
            ov.alpha.unwrap_or(SPARSE_ALPHA),
            ov.beta.unwrap_or(SPARSE_BETA),
            ov.tau.unwrap_or(epsilon / 8.0),
        )
    } else {
        (
            ov.alpha.unwrap_or(THRESHOLD_ALPHA),
            ov.beta.unwrap_or(THRESHOLD_BETA),
            ov.tau.unwrap_or(gamma * mp / est.value),
        )
    };
    if !(1.0 < alpha && alpha < beta) || !(tau > 0.0) {
        return Err(HsError::InvalidArgument(format!(
            "schedule constants need 1 < alpha < beta and tau > 0 (alpha = {alpha}, beta = {beta}, tau = {tau})"
        )));
    }
    Ok((
        Buckets {
            m_base: m,
            alpha,
            beta,
            scale: tau * est.value,
        },
        ScheduleParams {
            tau,
            alpha,
            beta,
            gamma,
            epsilon,
            t_star: None,
            edmax_estimate: est.value,
        },
    ))
}

/// `t* = ⌈(1/p) log(mp / log n)⌉`.
pub fn dense_switch_time(n: usize, m: usize, p: f64) -> f64 {
    ((m as f64 * p / (n as f64).ln()).ln() / p).ceil()
}

impl ScheduleTerms {
    fn geometric(&self) -> usize {
        let f = (self.mp * ((self.t - 1) as f64 * (-self.p).ln_1p()).exp()).ceil() as usize;
        f.clamp(1, (self.m - self.covered).max(1))
    }
}

impl Iterator for ScheduleTerms {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        self.t += 1;
        let remaining = self.m.saturating_sub(self.covered);
        let f = match &mut self.plan {
            Plan::Buckets(b) => b.term(remaining),
            Plan::Geometric => self.geometric(),
            Plan::Switch { t_star, after } => {
                if self.t <= *t_star {
                    self.geometric()
                } else {
                    if after.is_none() {
                        // Bucket schedule on the rows left after the switch.
                        let residual = remaining.max(1);
                        let (b, _) =
                            bucket_constants(self.n, residual, self.p, self.epsilon, &self.overrides)
                                .ok()?;
                        *after = Some(b);
                    }
                    after.as_ref().unwrap().term(remaining)
                }
            }
        };
        self.covered = (self.covered + f).min(self.m);
        Some(f)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    /// `f_1, …, f_K`.
    pub f: Vec<usize>,
    /// `F_1, …, F_K` (uncapped partial sums).
    pub partial_sums: Vec<usize>,
    /// First `t` with `F_t ≥ m − t`, if reached within `n` steps.
    pub k_tilde: Option<usize>,
    /// Number of blocks `K`.
    pub k_blocks: usize,
    pub case: ScheduleCase,
    pub params: ScheduleParams,
    /// `K̃` was not reached within `n` steps; `K = n` and the trivial
    /// fallback is expected to do the remaining work.
    pub overflowed: bool,
    terms: Option<ScheduleTerms>,
}

impl Schedule {
    /// A schedule carrying only a block count, for explicit instances.
    pub fn with_blocks(k_blocks: usize) -> Self {
        assert!(k_blocks >= 1);
        Schedule {
            f: vec![1; k_blocks],
            partial_sums: (1..=k_blocks).collect(),
            k_tilde: None,
            k_blocks,
            case: ScheduleCase::SparseOrThreshold,
            params: ScheduleParams {
                tau: f64::NAN,
                alpha: f64::NAN,
                beta: f64::NAN,
                gamma: f64::NAN,
                epsilon: f64::NAN,
                t_star: None,
                edmax_estimate: f64::NAN,
            },
            overflowed: false,
            terms: None,
        }
    }

    /// Continues the target sequence past `K` (empty for [`Schedule::with_blocks`]).
    pub fn terms(&self) -> impl Iterator<Item = usize> + '_ {
        self.terms.iter().flat_map(|t| t.clone())
    }
}

pub fn build_schedule(
    n: usize,
    m: usize,
    p: f64,
    epsilon: f64,
    overrides: Option<ScheduleOverrides>,
) -> Result<Schedule> {
    if !(p > 0.0 && p <= 0.5) {
        return Err(HsError::InvalidProbability(p));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(HsError::InvalidArgument(format!(
            "epsilon must lie in (0,1), got {epsilon}"
        )));
    }
    if m == 0 || n < 3 {
        return Err(HsError::InvalidArgument(format!(
            "schedule needs m >= 1 and n >= 3 (m = {m}, n = {n})"
        )));
    }
    let ov = overrides.unwrap_or_default();
    let thresholds = ov.thresholds.unwrap_or_default();
    let label = classify_regime(n, m, p, &thresholds)?;
    let (case, plan, params) = match label.regime {
        Regime::Sparse | Regime::Threshold => {
            let (b, params) = bucket_constants(n, m, p, epsilon, &ov)?;
            (ScheduleCase::SparseOrThreshold, Plan::Buckets(b), params)
        }
        Regime::Dense => {
            let t_star = dense_switch_time(n, m, p) as usize;
            let params = ScheduleParams {
                tau: ov.tau.unwrap_or(f64::NAN),
                alpha: ov.alpha.unwrap_or(THRESHOLD_ALPHA),
                beta: ov.beta.unwrap_or(THRESHOLD_BETA),
                gamma: ov.gamma.unwrap_or(THRESHOLD_GAMMA),
                epsilon,
                t_star: Some(t_star),
                edmax_estimate: m as f64 * p,
            };
            (
                ScheduleCase::DenseSwitch,
                Plan::Switch {
                    t_star,
                    after: None,
                },
                params,
            )
        }
        Regime::PolyDense => (
            ScheduleCase::PolyDense,
            Plan::Geometric,
            ScheduleParams {
                tau: f64::NAN,
                alpha: f64::NAN,
                beta: f64::NAN,
                gamma: f64::NAN,
                epsilon,
                t_star: None,
                edmax_estimate: m as f64 * p,
            },
        ),
    };
    let terms = ScheduleTerms {
        m,
        n,
        p,
        mp: m as f64 * p,
        t: 0,
        covered: 0,
        plan,
        overrides: ov,
        epsilon,
    };

    let mut f = Vec::new();
    let mut partial_sums = Vec::new();
    let mut k_tilde = None;
    let mut sum = 0usize;
    let mut gen = terms.clone();
    for t in 1..=n {
        let ft = gen.next().ok_or_else(|| {
            HsError::InvalidArgument("schedule terms could not be evaluated".into())
        })?;
        sum += ft;
        f.push(ft);
        partial_sums.push(sum);
        if sum + t >= m {
            k_tilde = Some(t);
            break;
        }
    }
    let (k_blocks, overflowed) = match k_tilde {
        Some(kt) => ((2 * kt).min(n), false),
        None => (n, true),
    };
    while f.len() < k_blocks {
        let ft = gen.next().unwrap_or(1);
        sum += ft;
        f.push(ft);
        partial_sums.push(sum);
    }
    Ok(Schedule {
        f,
        partial_sums,
        k_tilde,
        k_blocks,
        case,
        params,
        overflowed,
        terms: Some(terms),
    })
}
