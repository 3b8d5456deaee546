//! Greedy hitting-set heuristics: plain greedy, block greedy over
//! progressively unlocked random column blocks, best-of-J reshuffling and
//! the trivial one-column-per-row cover.

mod schedule;

pub use schedule::{
    build_schedule, dense_switch_time, Schedule, ScheduleCase, ScheduleOverrides,
    ScheduleParams, ScheduleTerms, DEFAULT_EPSILON,
};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bitset::BitSet;
use crate::error::{HsError, Result};
use crate::instance::HsInstance;
use crate::rng::derive_seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Greedy,
    BlockGreedy,
    BestOfJ,
    Trivial,
    ExactIp,
    BruteForce,
}

/// An integral hitting set with its construction trace.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverSolution {
    /// Picked columns in order.
    pub chosen: Vec<usize>,
    pub value: usize,
    /// Newly hit rows per pick (`b_t`).
    pub gains: Vec<usize>,
    /// Cumulative hit rows after each pick (`B_t`).
    pub covered_after: Vec<usize>,
    pub used_trivial_fallback: bool,
    pub algorithm: Algorithm,
}

/// Incremental cover under construction.
pub(crate) struct CoverBuilder<'a> {
    inst: &'a HsInstance,
    uncovered: BitSet,
    used: Vec<bool>,
    chosen: Vec<usize>,
    gains: Vec<usize>,
    covered_after: Vec<usize>,
}

impl<'a> CoverBuilder<'a> {
    pub(crate) fn new(inst: &'a HsInstance) -> Self {
        CoverBuilder {
            inst,
            uncovered: BitSet::full(inst.m()),
            used: vec![false; inst.n()],
            chosen: Vec::new(),
            gains: Vec::new(),
            covered_after: Vec::new(),
        }
    }

    #[inline]
    fn gain(&self, j: usize) -> usize {
        self.inst.col(j).intersection_count(&self.uncovered)
    }

    fn pick(&mut self, j: usize) {
        debug_assert!(!self.used[j]);
        let g = self.gain(j);
        self.uncovered.difference_with(self.inst.col(j));
        self.used[j] = true;
        self.chosen.push(j);
        self.gains.push(g);
        self.covered_after.push(self.inst.m() - self.uncovered.count());
    }

    fn done(&self) -> bool {
        self.uncovered.is_empty()
    }

    /// Best unused column among `candidates` (ties → lowest index).
    fn best_of<I: IntoIterator<Item = usize>>(&self, candidates: I) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize)> = None;
        for j in candidates {
            if self.used[j] {
                continue;
            }
            let g = self.gain(j);
            best = match best {
                Some((bj, bg)) if bg > g || (bg == g && bj < j) => Some((bj, bg)),
                _ => Some((j, g)),
            };
        }
        best
    }

    /// Covers each remaining row, in index order, by its lowest-index column.
    fn trivial_rest(&mut self) -> Result<bool> {
        let mut fired = false;
        while let Some(i) = self.uncovered.first() {
            let j = self.inst.row(i).first().ok_or(HsError::Infeasible { row: i })?;
            self.pick(j);
            fired = true;
        }
        Ok(fired)
    }

    fn finish(self, algorithm: Algorithm, used_trivial_fallback: bool) -> CoverSolution {
        CoverSolution {
            value: self.chosen.len(),
            chosen: self.chosen,
            gains: self.gains,
            covered_after: self.covered_after,
            used_trivial_fallback,
            algorithm,
        }
    }
}

fn check_feasible(inst: &HsInstance) -> Result<()> {
    match inst.empty_row() {
        Some(row) => Err(HsError::Infeasible { row }),
        None => Ok(()),
    }
}

/// Repeatedly picks the column hitting the most unhit rows.
pub fn greedy(inst: &HsInstance) -> Result<CoverSolution> {
    let mut b = CoverBuilder::new(inst);
    while !b.done() {
        match b.best_of(0..inst.n()) {
            Some((j, g)) if g > 0 => b.pick(j),
            _ => {
                return Err(HsError::Infeasible {
                    row: b.uncovered.first().expect("not done"),
                })
            }
        }
    }
    Ok(b.finish(Algorithm::Greedy, false))
}

/// One column per unhit row, rows in index order, lowest-index column first.
pub fn trivial_cover(inst: &HsInstance) -> Result<CoverSolution> {
    check_feasible(inst)?;
    let mut b = CoverBuilder::new(inst);
    b.trivial_rest()?;
    Ok(b.finish(Algorithm::Trivial, false))
}

/// Splits a seeded uniform shuffle of the columns into `k` blocks of
/// `⌊n/k⌋` columns; the `n mod k` leftover columns join the last block.
pub fn shuffled_blocks(n: usize, k: usize, seed: u64) -> Vec<Vec<usize>> {
    let k = k.clamp(1, n);
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let size = n / k;
    (0..k)
        .map(|t| {
            let end = if t + 1 == k { n } else { (t + 1) * size };
            perm[t * size..end].to_vec()
        })
        .collect()
}

/// Greedy restricted to progressively unlocked column blocks.
///
/// Step `t` unlocks block `t` and picks the best unused unlocked column.
/// A step whose best gain is zero picks nothing. After the last block the
/// remaining rows are covered trivially.
pub fn block_greedy(inst: &HsInstance, sched: &Schedule, seed: u64) -> Result<CoverSolution> {
    check_feasible(inst)?;
    let blocks = shuffled_blocks(inst.n(), sched.k_blocks, seed);
    let mut b = CoverBuilder::new(inst);
    let mut unlocked: Vec<usize> = Vec::with_capacity(inst.n());
    for block in &blocks {
        if b.done() {
            break;
        }
        unlocked.extend_from_slice(block);
        if let Some((j, g)) = b.best_of(unlocked.iter().copied()) {
            if g > 0 {
                b.pick(j);
            }
        }
        unlocked.retain(|&j| !b.used[j]);
    }
    let fired = b.trivial_rest()?;
    Ok(b.finish(Algorithm::BlockGreedy, fired))
}

/// Best of `j_copies` block-greedy runs with seeds `derive_seed(seed, [c])`.
///
/// Ties between equal values go to the lowest copy index.
pub fn block_greedy_best_of(
    inst: &HsInstance,
    sched: &Schedule,
    j_copies: usize,
    seed: u64,
) -> Result<CoverSolution> {
    if j_copies == 0 {
        return Err(HsError::InvalidArgument("J must be at least 1".into()));
    }
    let mut best: Option<CoverSolution> = None;
    for c in 0..j_copies {
        let sol = block_greedy(inst, sched, derive_seed(seed, &[c as u64]))?;
        if best.as_ref().map_or(true, |b| sol.value < b.value) {
            best = Some(sol);
        }
    }
    let mut best = best.expect("j_copies >= 1");
    best.algorithm = Algorithm::BestOfJ;
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn greedy_identity() {
        let s = greedy(&HsInstance::identity(3)).unwrap();
        assert_eq!(s.value, 3);
        assert_eq!(s.gains, vec![1, 1, 1]);
        assert_eq!(s.covered_after, vec![1, 2, 3]);
        assert_eq!(s.chosen, vec![0, 1, 2]);
    }

    #[test]
    fn greedy_single_full_row() {
        let inst = HsInstance::all_ones(1, 5);
        let s = greedy(&inst).unwrap();
        assert_eq!(s.value, 1);
        assert_eq!(s.chosen, vec![0]);
    }

    #[test]
    fn greedy_cycle() {
        let s = greedy(&HsInstance::circulant(6, 2)).unwrap();
        assert_eq!(s.value, 3);
        assert_eq!(s.chosen, vec![0, 2, 4]);
        assert_eq!(s.gains, vec![2, 2, 2]);
    }

    #[test]
    fn infeasible_instances() {
        let inst = HsInstance::from_row_strings(&["110", "000", "011"]).unwrap();
        assert!(matches!(greedy(&inst), Err(HsError::Infeasible { row: 1 })));
        assert!(matches!(
            trivial_cover(&inst),
            Err(HsError::Infeasible { row: 1 })
        ));
        let sched = Schedule::with_blocks(2);
        assert!(matches!(
            block_greedy(&inst, &sched, 0),
            Err(HsError::Infeasible { row: 1 })
        ));
    }

    #[test]
    fn trivial_examples() {
        assert_eq!(trivial_cover(&HsInstance::identity(3)).unwrap().value, 3);
        let s = trivial_cover(&HsInstance::all_ones(4, 6)).unwrap();
        assert_eq!(s.value, 1);
        assert_eq!(s.chosen, vec![0]);
    }

    #[test]
    fn block_greedy_small() {
        let id = HsInstance::identity(3);
        for seed in 0..5 {
            let s = block_greedy(&id, &Schedule::with_blocks(3), seed).unwrap();
            assert_eq!(s.value, 3);
        }
        let ones = HsInstance::all_ones(4, 6);
        let s = block_greedy(&ones, &Schedule::with_blocks(1), 9).unwrap();
        assert_eq!(s.value, 1);
        assert!(!s.used_trivial_fallback);
    }

    #[test]
    fn block_greedy_falls_back_when_blocks_run_out() {
        // One block, one pick, then two rows left for the fallback.
        let id = HsInstance::identity(3);
        let sched = Schedule::with_blocks(1);
        let s = block_greedy(&id, &sched, 0).unwrap();
        assert_eq!(s.value, 3);
        assert!(s.used_trivial_fallback);
        assert!(id.is_hitting_set(&s.chosen).unwrap());
    }

    #[test]
    fn blocks_partition_columns() {
        let blocks = shuffled_blocks(10, 3, 4);
        assert_eq!(blocks.iter().map(Vec::len).collect::<Vec<_>>(), vec![3, 3, 4]);
        let mut all: Vec<usize> = blocks.concat();
        all.sort_unstable();
        assert_eq!(all, (0..10).collect::<Vec<_>>());
    }

    #[test]
    fn best_of_one_matches_derived_seed() {
        let inst = crate::instance::generate(40, 30, 0.15, 5).unwrap();
        let sched = build_schedule(40, 30, 0.15, DEFAULT_EPSILON, None).unwrap();
        let single = block_greedy(&inst, &sched, derive_seed(77, &[0])).unwrap();
        let best = block_greedy_best_of(&inst, &sched, 1, 77).unwrap();
        assert_eq!(best.chosen, single.chosen);
        assert_eq!(best.algorithm, Algorithm::BestOfJ);
        assert_eq!(
            block_greedy_best_of(&HsInstance::identity(3), &Schedule::with_blocks(3), 10, 1)
                .unwrap()
                .value,
            3
        );
        assert!(block_greedy_best_of(&inst, &sched, 0, 1).is_err());
    }
}
