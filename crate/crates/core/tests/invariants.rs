use proptest::prelude::*;
use randhs_core::greedy::{shuffled_blocks, DEFAULT_EPSILON};
use randhs_core::instance::transpose;
use randhs_core::lp::{DEFAULT_C_TILDE, FEAS_TOL};
use randhs_core::theory::{
    binom_pmf_log, binom_upper_tail, chernoff_upper_tail, lambert_w0, lambert_w0_bracket,
};
use randhs_core::*;

fn instance() -> impl Strategy<Value = HsInstance> {
    (1usize..=14, 1usize..=18, prop::sample::select(vec![0.1, 0.2, 0.3, 0.5]), any::<u64>())
        .prop_map(|(n, m, p, seed)| generate(n, m, p, seed).unwrap())
}

fn feasible_instance() -> impl Strategy<Value = HsInstance> {
    instance().prop_filter("all-zero row", |inst| inst.empty_row().is_none())
}

/// Weak duality from scratch: feasibility of `x` and `y`, and equal objectives.
fn certify(inst: &HsInstance, s: &LpSolution) {
    let tol = 1e-7;
    for i in 0..inst.m() {
        let a: f64 = inst.row(i).iter().map(|j| s.x[j]).sum();
        assert!(a >= 1.0 - tol, "row {i} activity {a}");
    }
    assert!(s.x.iter().all(|&v| (-tol..=1.0 + tol).contains(&v)));
    assert!(s.duals.iter().all(|&y| y >= 0.0));
    let mut dual = s.duals.iter().sum::<f64>();
    for j in 0..inst.n() {
        let aty: f64 = inst.col(j).iter().map(|i| s.duals[i]).sum();
        dual -= (aty - 1.0).max(0.0);
    }
    let primal: f64 = s.x.iter().sum();
    assert!((primal - s.value).abs() <= 1e-9);
    assert!((primal - dual).abs() <= 1e-6, "primal {primal} dual {dual}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn cols_are_transpose_of_rows(inst in instance()) {
        let cols = transpose(inst.rows(), inst.n());
        prop_assert_eq!(cols.as_slice(), inst.cols());
        for i in 0..inst.m() {
            for j in 0..inst.n() {
                prop_assert_eq!(inst.row(i).contains(j), inst.col(j).contains(i));
            }
        }
    }

    #[test]
    fn generation_is_deterministic(n in 1usize..200, m in 1usize..50, seed: u64) {
        prop_assert_eq!(generate(n, m, 0.3, seed).unwrap(), generate(n, m, 0.3, seed).unwrap());
        let deg = randhs_core::instance::generate_degrees(n, m, 0.3, seed).unwrap();
        prop_assert_eq!(deg, generate(n, m, 0.3, seed).unwrap().degrees());
    }

    #[test]
    fn full_set_hits_iff_no_zero_row(inst in instance()) {
        let all: Vec<usize> = (0..inst.n()).collect();
        prop_assert_eq!(inst.is_hitting_set(&all).unwrap(), inst.empty_row().is_none());
    }

    #[test]
    fn text_round_trip(inst in instance()) {
        prop_assert_eq!(HsInstance::from_text(&inst.to_text()).unwrap(), inst);
    }

    #[test]
    fn covers_are_valid(inst in feasible_instance(), seed: u64) {
        let g = greedy(&inst).unwrap();
        prop_assert!(inst.is_hitting_set(&g.chosen).unwrap());
        prop_assert!(g.gains.windows(2).all(|w| w[0] >= w[1]), "gains {:?}", g.gains);
        prop_assert!(inst.is_hitting_set(&trivial_cover(&inst).unwrap().chosen).unwrap());
        let k = 1 + (seed % inst.n() as u64) as usize;
        let b = block_greedy(&inst, &Schedule::with_blocks(k), seed).unwrap();
        prop_assert!(inst.is_hitting_set(&b.chosen).unwrap());
        prop_assert_eq!(b.value, b.chosen.len());
    }

    #[test]
    fn lp_sandwich_and_certificate(inst in feasible_instance()) {
        let lp = solve_lp(&inst, FEAS_TOL, None).unwrap();
        prop_assert_eq!(lp.status, LpStatus::Optimal);
        certify(&inst, &lp);
        let lb = lp_lower_bound(&inst).unwrap();
        prop_assert!(lb <= lp.value + 1e-6);
        if let Some(ub) = uniform_upper_bound(&inst, None, DEFAULT_C_TILDE).unwrap() {
            prop_assert!(lp.value <= ub + 1e-6);
        }
        let ip = solve_ip_exact(&inst, 1_000_000).unwrap();
        prop_assert!(ip.optimal);
        let vip = ip.solution.value as f64;
        prop_assert!(lp.value <= vip + 1e-6);
        prop_assert!(ip.solution.value >= inst.m().div_ceil(inst.dmax()));
        let g = greedy(&inst).unwrap();
        prop_assert!(ip.solution.value <= g.value);
        let lovasz = (1.0 + (inst.dmax() as f64).ln()) * lp.value;
        prop_assert!(g.value as f64 <= lovasz + 1e-6);
    }

    #[test]
    fn lp_row_duplication_invariance(inst in feasible_instance()) {
        let mut rows = inst.rows().to_vec();
        rows.extend_from_slice(inst.rows());
        let doubled = HsInstance::from_rows(inst.n(), rows).unwrap();
        let a = solve_lp(&inst, FEAS_TOL, None).unwrap().value;
        let b = solve_lp(&doubled, FEAS_TOL, None).unwrap().value;
        prop_assert!((a - b).abs() <= 1e-9, "{a} vs {b}");
        prop_assert_eq!(doubled.dmax(), 2 * inst.dmax());
        prop_assert_eq!(
            lp_lower_bound(&doubled).unwrap(),
            lp_lower_bound(&inst).unwrap()
        );
    }

    #[test]
    fn feasible_counts_are_monotone(inst in instance()) {
        let n = inst.n().min(10);
        let sub = HsInstance::from_rows(
            n,
            inst.rows()
                .iter()
                .map(|r| BitSet::from_indices(n, r.iter().filter(|&j| j < n)))
                .collect(),
        )
        .unwrap();
        for k in 0..n {
            if count_feasible_k(&sub, k).unwrap() > 0 {
                prop_assert!(count_feasible_k(&sub, k + 1).unwrap() > 0);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn larger_lps_certify(
        n in 20usize..120,
        m in 20usize..150,
        p in prop::sample::select(vec![0.05, 0.1, 0.2]),
        seed: u64,
    ) {
        let inst = generate(n, m, p, seed).unwrap();
        prop_assume!(inst.empty_row().is_none());
        let lp = solve_lp(&inst, FEAS_TOL, None).unwrap();
        prop_assert_eq!(lp.status, LpStatus::Optimal);
        certify(&inst, &lp);
    }

    #[test]
    fn best_of_is_monotone_in_j(seed: u64, n in 30usize..80) {
        let inst = generate(n, n, 0.1, seed).unwrap();
        prop_assume!(inst.empty_row().is_none());
        let sched = build_schedule(n, n, 0.1, DEFAULT_EPSILON, None).unwrap();
        let vals: Vec<usize> = [1, 2, 4, 8]
            .iter()
            .map(|&j| block_greedy_best_of(&inst, &sched, j, seed).unwrap().value)
            .collect();
        prop_assert!(vals.windows(2).all(|w| w[0] >= w[1]), "{:?}", vals);
    }

    #[test]
    fn schedules_reach_m(
        n in 50usize..3000,
        m_exp in 0.2f64..1.2,
        d in 0.05f64..0.9,
    ) {
        let m = ((n as f64).powf(m_exp) as usize).max(1);
        let p = (n as f64).powf(-d).min(0.5);
        let Ok(s) = build_schedule(n, m, p, DEFAULT_EPSILON, None) else {
            return Ok(());
        };
        prop_assert!(s.f.iter().all(|&f| f >= 1));
        prop_assert_eq!(s.f.len(), s.k_blocks);
        if !s.overflowed {
            let fk = *s.partial_sums.last().unwrap();
            prop_assert!(fk + s.k_blocks >= m, "F_K = {fk}, K = {}, m = {m}", s.k_blocks);
        }
    }

    #[test]
    fn block_partition(n in 1usize..500, k in 1usize..600, seed: u64) {
        let blocks = shuffled_blocks(n, k, seed);
        let mut all = blocks.concat();
        all.sort_unstable();
        prop_assert_eq!(all, (0..n).collect::<Vec<_>>());
    }
}

#[test]
fn ip_matches_bruteforce_on_small_instances() {
    let mut checked = 0;
    for seed in 0..300u64 {
        let p = [0.1, 0.3, 0.5][seed as usize % 3];
        let n = 4 + (seed as usize * 7) % 17;
        let m = 3 + (seed as usize * 11) % 28;
        let inst = generate(n, m, p, seed).unwrap();
        if inst.empty_row().is_some() {
            continue;
        }
        let bnb = solve_ip_exact(&inst, 1_000_000).unwrap();
        let brute = solve_ip_bruteforce(&inst).unwrap();
        assert!(bnb.optimal);
        assert_eq!(bnb.solution.value, brute.solution.value, "seed {seed}");
        assert!(inst.is_hitting_set(&bnb.solution.chosen).unwrap());
        checked += 1;
    }
    assert!(checked >= 100, "only {checked} feasible draws");
}

#[test]
fn different_seeds_give_different_matrices() {
    let differ = (0..100u64)
        .filter(|&s| generate(20, 20, 0.5, s).unwrap() != generate(20, 20, 0.5, s + 1000).unwrap())
        .count();
    assert!(differ > 0);
    assert_eq!(differ, 100);
}

#[test]
fn mean_degree_within_four_standard_errors() {
    let (n, m, p) = (2000, 200, 0.1);
    let seeds = 5;
    let mut total = 0.0;
    for seed in 0..seeds {
        let deg = randhs_core::instance::generate_degrees(n, m, p, seed).unwrap();
        total += deg.iter().sum::<usize>() as f64 / n as f64;
    }
    let mean = total / seeds as f64;
    let mp = m as f64 * p;
    let se = (mp * (1.0 - p) / (n as f64 * seeds as f64)).sqrt();
    assert!((mean - mp).abs() <= 4.0 * se, "mean {mean}, se {se}");
}

#[test]
fn lambert_identity_and_bracket() {
    for i in 0..200 {
        let x = std::f64::consts::E * (1e9 / std::f64::consts::E).powf(i as f64 / 199.0);
        let w = lambert_w0(x).unwrap();
        assert!((w - (x / w).ln()).abs() <= 1e-10, "x = {x}");
        let (lo, hi) = lambert_w0_bracket(x).unwrap();
        assert!(lo <= w && w <= hi, "x = {x}: {lo} {w} {hi}");
    }
}

#[test]
fn pmf_sums_to_one() {
    for m in [1u64, 7, 50, 120, 200] {
        for p in [0.01, 0.1, 0.3, 0.5, 0.9] {
            let s: f64 = (0..=m).map(|r| binom_pmf_log(m, p, r).unwrap().exp()).sum();
            assert!((s - 1.0).abs() <= 1e-10, "m {m} p {p}: {s}");
        }
    }
}

#[test]
fn chernoff_dominates_exact_tail() {
    for m in (5..=100u64).step_by(5) {
        for p in [0.1, 0.5] {
            for delta in [0.5, 1.0, 2.0] {
                let mu = m as f64 * p;
                let k = ((1.0 + delta) * mu).ceil() as u64;
                let exact = if k > m { 0.0 } else { binom_upper_tail(m, p, k).unwrap() };
                assert!(chernoff_upper_tail(mu, delta).unwrap() >= exact - 1e-15);
            }
        }
    }
}

#[test]
fn dmax_concentrates_below_four_times_estimate() {
    let (n, m, p) = (10_000, 50, 0.02);
    let est = randhs_core::theory::expected_dmax_estimate(n, m, p, &RegimeThresholds::default())
        .unwrap()
        .value;
    let trials = 1000;
    let high = (0..trials)
        .filter(|&s| {
            let deg = randhs_core::instance::generate_degrees(n, m, p, s).unwrap();
            *deg.iter().max().unwrap() as f64 >= 4.0 * est
        })
        .count();
    assert!(high as f64 <= 0.05 * trials as f64, "{high} of {trials}");
}

#[test]
fn pmf_lower_bound_calibration() {
    use randhs_core::theory::{binom_pmf_lower_bound_log, PmfBoundVariant};
    // The bound is a leading term only; at a = 10^4 the exact value clears it
    // with slack 0.2.
    let exact = binom_pmf_log(10_000, 0.001, 100).unwrap();
    let bound = binom_pmf_lower_bound_log(1e4, 100.0, 0.001, PmfBoundVariant::SmallB { c: 1.5 }).unwrap();
    assert!(exact >= bound * 1.2, "exact {exact}, bound {bound}");
    let large = binom_pmf_lower_bound_log(1e4, 100.0, 0.001, PmfBoundVariant::LargeB).unwrap();
    assert!(exact >= large * 1.2, "exact {exact}, bound {large}");
}

#[test]
fn covers_valid_on_larger_instances() {
    let mut checked = 0;
    for seed in 0..500u64 {
        let p = [0.05, 0.2, 0.5][seed as usize % 3];
        let n = 5 + (seed as usize * 37) % 196;
        let m = 5 + (seed as usize * 53) % 196;
        let inst = generate(n, m, p, seed).unwrap();
        if inst.empty_row().is_some() {
            assert!(greedy(&inst).is_err());
            continue;
        }
        let g = greedy(&inst).unwrap();
        assert!(inst.is_hitting_set(&g.chosen).unwrap(), "seed {seed}");
        if let Ok(sched) = build_schedule(n, m, p, DEFAULT_EPSILON, None) {
            let b = block_greedy(&inst, &sched, seed).unwrap();
            assert!(inst.is_hitting_set(&b.chosen).unwrap(), "seed {seed}");
        }
        checked += 1;
    }
    assert!(checked > 300);
}

/// Slow: ten 2000×2000 LP solves.
#[test]
#[ignore]
fn dense_lp_value_scales_like_one_over_p() {
    let p = 0.1;
    for seed in 0..10 {
        let inst = generate(2000, 2000, p, seed).unwrap();
        let v = solve_lp(&inst, FEAS_TOL, None).unwrap().value;
        assert!((0.5..=3.0).contains(&(v * p)), "seed {seed}: val_LP = {v}");
    }
}
