//! Shared fixtures for the solver benchmarks.

use randhs_core::{generate, HsInstance};

/// `(label, n, m, p)` of the benchmarked grid points.
pub const POINTS: [(&str, usize, usize, f64); 3] = [
    ("sparse", 10_000, 50, 0.02),
    ("threshold", 500, 500, 0.02),
    ("dense", 500, 500, 0.1),
];

/// A feasible instance at `(n, m, p)`; seeds are tried in order from 0.
pub fn feasible_instance(n: usize, m: usize, p: f64) -> HsInstance {
    (0..)
        .map(|s| generate(n, m, p, s).unwrap())
        .find(|inst| inst.empty_row().is_none())
        .unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_are_feasible() {
        for (_, n, m, p) in POINTS {
            let inst = feasible_instance(n, m, p);
            assert_eq!((inst.n(), inst.m()), (n, m));
            assert!(inst.empty_row().is_none());
        }
    }
}
