//! Random hitting set instances and solvers.
//!
//! Instances are `m×n` Bernoulli(p) incidence matrices; the crate provides
//! greedy and block-greedy covers, the covering LP relaxation with its
//! closed-form bounds, exact branch and bound, and the analytic
//! calculators used to compare them.

pub mod bitset;
pub mod error;
pub mod greedy;
pub mod instance;
pub mod ip;
pub mod lp;
pub mod rng;
pub mod theory;

pub use bitset::BitSet;
pub use error::{HsError, Result};
pub use greedy::{
    block_greedy, block_greedy_best_of, build_schedule, greedy, trivial_cover, Algorithm,
    CoverSolution, Schedule, ScheduleCase, ScheduleOverrides,
};
pub use instance::{
    assumption_check, classify_regime, generate, GenMeta, HsInstance, Regime, RegimeLabel,
    RegimeThresholds,
};
pub use ip::{
    count_feasible_k, expected_zk_log, first_moment_thresholds, solve_ip_bruteforce,
    solve_ip_exact, solve_ip_exact_with, FirstMomentReport, IpOptions, IpResult,
};
pub use lp::{
    lp_lower_bound, solve_lp, solve_lp_with, uniform_upper_bound, LpOptions, LpSolution, LpStatus,
};
pub use rng::derive_seed;
