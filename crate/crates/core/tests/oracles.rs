use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, ToPrimitive, Zero};
use randhs_core::greedy::shuffled_blocks;
use randhs_core::lp::FEAS_TOL;
use randhs_core::theory::binom_pmf_log;
use randhs_core::*;

fn ratio(a: i64, b: i64) -> BigRational {
    BigRational::new(BigInt::from(a), BigInt::from(b))
}

fn binomial(n: u64, k: u64) -> BigRational {
    let mut c = BigRational::one();
    for i in 0..k {
        c = c * ratio((n - i) as i64, (i + 1) as i64);
    }
    c
}

fn pow(x: &BigRational, e: u64) -> BigRational {
    (0..e).fold(BigRational::one(), |acc, _| acc * x)
}

#[test]
fn binomial_pmf_matches_exact_rational() {
    // Bin(50, 1/50) at r = 5.
    let p = ratio(1, 50);
    let q = BigRational::one() - &p;
    let exact = binomial(50, 5) * pow(&p, 5) * pow(&q, 45);
    let exact = exact.to_f64().unwrap();
    let got = binom_pmf_log(50, 0.02, 5).unwrap().exp();
    assert!((got / exact - 1.0).abs() < 1e-12, "{got} vs {exact}");

    for (m, r) in [(10u64, 0u64), (10, 10), (37, 11), (200, 40)] {
        let p = ratio(3, 10);
        let q = BigRational::one() - &p;
        let exact = (binomial(m, r) * pow(&p, r) * pow(&q, m - r)).to_f64().unwrap();
        let got = binom_pmf_log(m, 0.3, r).unwrap().exp();
        assert!((got / exact - 1.0).abs() < 1e-11, "m {m} r {r}: {got} vs {exact}");
    }
}

#[test]
fn first_moment_matches_exact_rational() {
    // E Z_k = C(n,k) (1 − (1−p)^k)^m with p = 2/5.
    let p = ratio(2, 5);
    let q = BigRational::one() - &p;
    for (n, m) in [(10usize, 6usize), (30, 40), (8, 100)] {
        for k in 1..=n.min(6) {
            let hit = BigRational::one() - pow(&q, k as u64);
            let exact = binomial(n as u64, k as u64) * pow(&hit, m as u64);
            let got = expected_zk_log(n, m, 0.4, k).unwrap();
            let want = exact.to_f64().unwrap().ln();
            assert!((got - want).abs() < 1e-12, "n {n} m {m} k {k}: {got} vs {want}");
        }
    }
    assert_eq!(expected_zk_log(10, 6, 0.4, 0).unwrap(), f64::NEG_INFINITY);
}

#[test]
fn feasible_count_matches_subset_enumeration() {
    for seed in 0..20 {
        let inst = generate(9, 7, 0.35, seed).unwrap();
        let mut by_size = [0u64; 10];
        for mask in 0u32..(1 << 9) {
            let hits = (0..inst.m()).all(|i| (0..9).any(|j| mask >> j & 1 == 1 && inst.get(i, j)));
            if hits {
                by_size[mask.count_ones() as usize] += 1;
            }
        }
        for (k, &want) in by_size.iter().enumerate() {
            assert_eq!(count_feasible_k(&inst, k).unwrap(), want, "seed {seed} k {k}");
        }
    }
}

/// Textbook greedy on a dense boolean matrix.
fn reference_greedy(inst: &HsInstance, allowed: &[usize], uncovered: &mut Vec<bool>) -> Option<usize> {
    let mut best: Option<(usize, usize)> = None;
    for &j in allowed {
        let g = (0..inst.m()).filter(|&i| uncovered[i] && inst.get(i, j)).count();
        if best.map_or(true, |(bj, bg)| g > bg || (g == bg && j < bj)) {
            best = Some((j, g));
        }
    }
    let (j, g) = best?;
    if g == 0 {
        return None;
    }
    for i in 0..inst.m() {
        if inst.get(i, j) {
            uncovered[i] = false;
        }
    }
    Some(j)
}

#[test]
fn greedy_matches_reference() {
    for seed in 0..40 {
        let inst = generate(35, 50, 0.12, seed).unwrap();
        if inst.empty_row().is_some() {
            continue;
        }
        let mut uncovered = vec![true; inst.m()];
        let all: Vec<usize> = (0..inst.n()).collect();
        let mut chosen = Vec::new();
        while uncovered.iter().any(|&u| u) {
            chosen.push(reference_greedy(&inst, &all, &mut uncovered).unwrap());
        }
        assert_eq!(greedy(&inst).unwrap().chosen, chosen, "seed {seed}");
    }
}

#[test]
fn block_greedy_matches_reference() {
    for seed in 0..40 {
        let inst = generate(60, 40, 0.08, seed).unwrap();
        if inst.empty_row().is_some() {
            continue;
        }
        let k = 3 + seed as usize % 20;
        let blocks = shuffled_blocks(inst.n(), k, seed);
        let mut uncovered = vec![true; inst.m()];
        let mut unlocked: Vec<usize> = Vec::new();
        let mut chosen: Vec<usize> = Vec::new();
        for b in &blocks {
            if !uncovered.iter().any(|&u| u) {
                break;
            }
            unlocked.extend(b);
            let free: Vec<usize> = unlocked.iter().copied().filter(|j| !chosen.contains(j)).collect();
            if let Some(j) = reference_greedy(&inst, &free, &mut uncovered) {
                chosen.push(j);
            }
        }
        let mut fallback = false;
        while let Some(i) = uncovered.iter().position(|&u| u) {
            let j = (0..inst.n()).find(|&j| inst.get(i, j)).unwrap();
            for r in 0..inst.m() {
                if inst.get(r, j) {
                    uncovered[r] = false;
                }
            }
            chosen.push(j);
            fallback = true;
        }
        let got = block_greedy(&inst, &Schedule::with_blocks(k), seed).unwrap();
        assert_eq!(got.chosen, chosen, "seed {seed}");
        assert_eq!(got.used_trivial_fallback, fallback);
    }
}

#[test]
fn regular_example_goldens() {
    let c62 = HsInstance::circulant(6, 2);
    let c52 = HsInstance::circulant(5, 2);
    let lp62 = solve_lp(&c62, FEAS_TOL, None).unwrap();
    let lp52 = solve_lp(&c52, FEAS_TOL, None).unwrap();
    assert!((lp62.value - 3.0).abs() < 1e-6);
    assert!((lp52.value - 2.5).abs() < 1e-6);
    assert_eq!(solve_ip_exact(&c62, 1000).unwrap().solution.value, 3);
    assert_eq!(solve_ip_exact(&c52, 1000).unwrap().solution.value, 3);
    assert_eq!(solve_ip_bruteforce(&c52).unwrap().solution.value, 3);
    // Every k-regular circulant has LP value n/k.
    for n in 3..30 {
        for k in 1..n.min(6) {
            let v = solve_lp(&HsInstance::circulant(n, k), FEAS_TOL, None).unwrap().value;
            assert!((v - n as f64 / k as f64).abs() < 1e-9, "n {n} k {k}: {v}");
        }
    }
}

#[test]
fn instance_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("inst.hs");
    let inst = generate(37, 23, 0.2, 99).unwrap();
    inst.save(&path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("hs 23 37\nmeta p=0.2 seed=99 gen="));
    assert!(text.lines().all(|l| !l.ends_with(' ')));
    let back = HsInstance::load(&path).unwrap();
    assert_eq!(back, inst);
    assert_eq!(back.gen_meta().unwrap().seed, 99);

    let plain = dir.path().join("plain.hs");
    std::fs::write(&plain, "hs 2 3\n101\n010\n").unwrap();
    let inst = HsInstance::load(&plain).unwrap();
    assert!(inst.gen_meta().is_none());
    assert_eq!(inst.degrees(), vec![1, 1, 1]);

    std::fs::write(&plain, "hs 2 3\n101\n01\n").unwrap();
    assert!(HsInstance::load(&plain).is_err());
    assert!(HsInstance::load(dir.path().join("missing.hs")).is_err());
}

#[test]
fn zero_count_for_infeasible_sizes() {
    let inst = HsInstance::identity(5);
    for k in 0..5 {
        assert!(count_feasible_k(&inst, k).unwrap().is_zero());
    }
    assert_eq!(count_feasible_k(&inst, 5).unwrap(), 1);
}
