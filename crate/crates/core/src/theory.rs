//! Closed-form quantities for random Bernoulli instances: the principal
//! Lambert W branch, estimates of the expected maximum column degree,
//! binomial tail and mass-function bounds.
//!
//! Everything works in natural logarithms and `f64`.

use statrs::function::factorial::ln_binomial;

use crate::error::{HsError, Result};
use crate::instance::{classify_regime, Regime, RegimeLabel, RegimeThresholds};

const W0_MAX_ITERS: usize = 50;
const W0_REL_TOL: f64 = 1e-14;

/// Principal branch `W0(x)` of the solution of `w·e^w = x`, for `x ≥ −1/e`.
///
/// Halley iteration started from `log x − log log x` when `x ≥ e`, from the
/// branch-point expansion near `−1/e`, and from `x` otherwise.
pub fn lambert_w0(x: f64) -> Result<f64> {
    let branch = -(-1.0f64).exp();
    if x.is_nan() || x < branch {
        return Err(HsError::domain(format!("W0 undefined for x = {x} < -1/e")));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x == branch {
        return Ok(-1.0);
    }
    if x.is_infinite() {
        return Ok(f64::INFINITY);
    }
    let mut w = if x >= std::f64::consts::E {
        let l1 = x.ln();
        l1 - l1.ln()
    } else if x < -0.25 {
        let q = (2.0 * (1.0 + std::f64::consts::E * x)).max(0.0).sqrt();
        -1.0 + q - q * q / 3.0
    } else {
        // w·e^w ≈ w(1 + w) near the origin; log1p keeps the seed below W0(e) = 1.
        x.ln_1p()
    };
    for _ in 0..W0_MAX_ITERS {
        let ew = w.exp();
        let f = w * ew - x;
        let wp1 = w + 1.0;
        if wp1 == 0.0 {
            break;
        }
        let denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        let step = f / denom;
        w -= step;
        if step.abs() <= W0_REL_TOL * w.abs().max(1e-300) {
            break;
        }
    }
    Ok(w)
}

/// Bracket `[lo, hi]` containing `W0(x)` for `x ≥ e`:
/// `lo = L1 − L2 + L2/(2 L1)`, `hi = L1 − L2 + (e/(e−1))·L2/L1`
/// with `L1 = log x`, `L2 = log log x`.
pub fn lambert_w0_bracket(x: f64) -> Option<(f64, f64)> {
    if !(x >= std::f64::consts::E) {
        return None;
    }
    let l1 = x.ln();
    let l2 = l1.ln();
    let e = std::f64::consts::E;
    Some((l1 - l2 + l2 / (2.0 * l1), l1 - l2 + e / (e - 1.0) * l2 / l1))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DmaxFormula {
    /// `g_n = log n / log(log n / mp)`, valid for `mp < log n`.
    GnSparse,
    /// `mp`.
    MpDense,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DmaxEstimate {
    pub value: f64,
    pub regime: RegimeLabel,
    pub formula_used: DmaxFormula,
    /// Defined only when `mp < log n`.
    pub g_n: Option<f64>,
}

/// `g_n = log n / log(log n / mp)`; requires `mp < log n`.
pub fn g_n(n: usize, m: usize, p: f64) -> Result<f64> {
    let log_n = (n as f64).ln();
    let mp = m as f64 * p;
    if !(mp > 0.0 && mp < log_n) {
        return Err(HsError::RegimeViolation(format!(
            "g_n needs 0 < mp < log n (mp = {mp}, log n = {log_n})"
        )));
    }
    Ok(log_n / (log_n / mp).ln())
}

/// Closed-form estimate of `E[dmax]`: `g_n` in the sparse regime, `mp` otherwise.
pub fn expected_dmax_estimate(
    n: usize,
    m: usize,
    p: f64,
    thresholds: &RegimeThresholds,
) -> Result<DmaxEstimate> {
    let formula = match classify_regime_checked(n, m, p, thresholds)?.regime {
        Regime::Sparse => DmaxFormula::GnSparse,
        _ => DmaxFormula::MpDense,
    };
    expected_dmax_with(n, m, p, thresholds, formula)
}

/// Like [`expected_dmax_estimate`] but with the formula chosen by the caller.
pub fn expected_dmax_with(
    n: usize,
    m: usize,
    p: f64,
    thresholds: &RegimeThresholds,
    formula: DmaxFormula,
) -> Result<DmaxEstimate> {
    let regime = classify_regime_checked(n, m, p, thresholds)?;
    let g = g_n(n, m, p).ok();
    let value = match formula {
        DmaxFormula::GnSparse => g.ok_or_else(|| {
            HsError::domain(format!(
                "sparse formula requested with mp = {} >= log n = {}",
                m as f64 * p,
                (n as f64).ln()
            ))
        })?,
        DmaxFormula::MpDense => m as f64 * p,
    };
    Ok(DmaxEstimate {
        value,
        regime,
        formula_used: formula,
        g_n: g,
    })
}

fn classify_regime_checked(
    n: usize,
    m: usize,
    p: f64,
    thresholds: &RegimeThresholds,
) -> Result<RegimeLabel> {
    if n < 3 {
        return Err(HsError::InvalidArgument(format!("need n >= 3, got {n}")));
    }
    if !(p > 0.0 && p < 1.0) {
        return Err(HsError::InvalidProbability(p));
    }
    classify_regime(n, m, p, thresholds)
}

/// Upper-tail Chernoff bound `exp(−δ²μ/(2+δ)) ≥ P(X ≥ (1+δ)μ)`.
pub fn chernoff_upper_tail(mu: f64, delta_dev: f64) -> Result<f64> {
    if !(mu > 0.0 && delta_dev > 0.0) {
        return Err(HsError::domain(format!(
            "Chernoff bound needs mu > 0 and delta > 0 (got {mu}, {delta_dev})"
        )));
    }
    Ok((-delta_dev * delta_dev * mu / (2.0 + delta_dev)).exp())
}

/// `log P(Bin(m, p) = r)`.
pub fn binom_pmf_log(m: u64, p: f64, r: u64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(HsError::InvalidProbability(p));
    }
    if r > m {
        return Err(HsError::IndexOutOfRange {
            index: r as usize,
            len: m as usize + 1,
        });
    }
    Ok(pmf_log_unchecked(m, p, r))
}

fn pmf_log_unchecked(m: u64, p: f64, r: u64) -> f64 {
    if r > m {
        return f64::NEG_INFINITY;
    }
    if p == 0.0 {
        return if r == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    if p == 1.0 {
        return if r == m { 0.0 } else { f64::NEG_INFINITY };
    }
    ln_binomial(m, r) + r as f64 * p.ln() + (m - r) as f64 * (-p).ln_1p()
}

/// Exact `P(Bin(m, p) ≥ k)` by summing the mass function.
pub fn binom_upper_tail(m: u64, p: f64, k: u64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(HsError::InvalidProbability(p));
    }
    Ok((k..=m).map(|r| pmf_log_unchecked(m, p, r).exp()).sum())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PmfBoundVariant {
    /// `−(b log(b/ap) − b + ap)`, requiring `b ≥ c·ap` with `c > 1`.
    SmallB { c: f64 },
    /// `−b log(b/ap)`, requiring `b > ap`.
    LargeB,
}

/// Leading term of the lower bound on `log P(Bin(⌈a⌉, p) = ⌈b⌉)`.
///
/// The `(1 + o(1))` factor is not applied.
pub fn binom_pmf_lower_bound_log(a: f64, b: f64, p: f64, variant: PmfBoundVariant) -> Result<f64> {
    if !(1.0 <= b && b <= a) {
        return Err(HsError::domain(format!("need 1 <= b <= a (a = {a}, b = {b})")));
    }
    if !(p > 0.0 && p < 1.0) {
        return Err(HsError::InvalidProbability(p));
    }
    let ap = a * p;
    match variant {
        PmfBoundVariant::SmallB { c } => {
            if !(c > 1.0 && b >= c * ap) {
                return Err(HsError::domain(format!(
                    "small-b bound needs c > 1 and b >= c*a*p (c = {c}, b = {b}, ap = {ap})"
                )));
            }
            Ok(-(b * (b / ap).ln() - b + ap))
        }
        PmfBoundVariant::LargeB => {
            if !(b > ap) {
                return Err(HsError::domain(format!(
                    "large-b bound needs b > a*p (b = {b}, ap = {ap})"
                )));
            }
            Ok(-(b * (b / ap).ln()))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SparseTarget {
    /// `⌈(ε/8)·g_n⌉`, at least 1.
    pub degree: u64,
    /// `log P(Bin(m, p) = degree)`.
    pub log_pmf: f64,
}

/// Column degree that block-greedy hunts for in the sparse regime.
pub fn sparse_target_degree(n: usize, m: usize, p: f64, epsilon: f64) -> Result<SparseTarget> {
    if !(epsilon > 0.0) {
        return Err(HsError::domain(format!("epsilon must be positive, got {epsilon}")));
    }
    if !(p > 0.0 && p < 1.0) {
        return Err(HsError::InvalidProbability(p));
    }
    let g = g_n(n, m, p)?;
    let degree = ((epsilon / 8.0 * g).ceil() as u64).max(1);
    Ok(SparseTarget {
        degree,
        log_pmf: pmf_log_unchecked(m as u64, p, degree),
    })
}

const MONOTONE_SLACK: f64 = 1e-12;

/// Checks `P(S_m = r+1) ≤ P(S_m = r)` and `P(S_{m−1} = r) ≤ P(S_m = r)`
/// for `S_m ~ Bin(m, p)` and `r ≥ mp`, using exact mass functions.
pub fn binomial_monotonicity_check(m: u64, p: f64, r: u64) -> Result<(bool, bool)> {
    if !(0.0..=1.0).contains(&p) {
        return Err(HsError::InvalidProbability(p));
    }
    if m == 0 || (r as f64) < m as f64 * p {
        return Err(HsError::domain(format!(
            "monotonicity needs m >= 1 and r >= mp (m = {m}, p = {p}, r = {r})"
        )));
    }
    let at_r = pmf_log_unchecked(m, p, r);
    let le = |x: f64| x == f64::NEG_INFINITY || x <= at_r + MONOTONE_SLACK * at_r.abs().max(1.0);
    Ok((
        le(pmf_log_unchecked(m, p, r + 1)),
        le(pmf_log_unchecked(m - 1, p, r)),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn w0_fixed_points() {
        assert_eq!(lambert_w0(0.0).unwrap(), 0.0);
        assert!((lambert_w0(std::f64::consts::E).unwrap() - 1.0).abs() < 1e-15);
        assert!((lambert_w0(-(-1.0f64).exp()).unwrap() + 1.0).abs() < 1e-12);
        assert!(matches!(lambert_w0(-0.5), Err(HsError::Domain(_))));
    }

    #[test]
    fn w0_omega_constant() {
        // Independent route: the iteration w ← (1 + w) / (1 + e^w), fixed point w·e^w = 1.
        let mut w = 0.5f64;
        for _ in 0..200 {
            w = (1.0 + w) / (1.0 + w.exp());
        }
        assert!((w - 0.567_143_290_409_783_9).abs() < 1e-14);
        assert!((lambert_w0(1.0).unwrap() - w).abs() < 1e-12);
    }

    #[test]
    fn w0_residual_across_domain() {
        let mut x = -0.3678;
        while x < 1e12 {
            let w = lambert_w0(x).unwrap();
            assert!(
                (w * w.exp() - x).abs() <= 1e-12 * x.abs().max(1.0),
                "x = {x}, w = {w}"
            );
            x = if x < 1.0 { x + 0.0137 } else { x * 1.7 };
        }
    }

    #[test]
    fn chernoff_examples() {
        assert!((chernoff_upper_tail(10.0, 1.0).unwrap() - (-10.0f64 / 3.0).exp()).abs() < 1e-15);
        assert!((chernoff_upper_tail(1.0, 2.0).unwrap() - (-1.0f64).exp()).abs() < 1e-15);
        assert!(chernoff_upper_tail(5.0, 1e-9).unwrap() > 1.0 - 1e-8);
        let exact = binom_upper_tail(20, 0.5, 20).unwrap();
        assert!((exact - 0.5f64.powi(20)).abs() < 1e-18);
        assert!(exact <= chernoff_upper_tail(10.0, 1.0).unwrap());
        assert!(chernoff_upper_tail(0.0, 1.0).is_err());
        assert!(chernoff_upper_tail(1.0, -1.0).is_err());
    }

    #[test]
    fn pmf_small_cases() {
        assert!((binom_pmf_log(2, 0.5, 1).unwrap() - 0.5f64.ln()).abs() < 1e-15);
        assert!((binom_pmf_log(1, 0.3, 1).unwrap() - 0.3f64.ln()).abs() < 1e-15);
        assert_eq!(binom_pmf_log(3, 0.0, 1).unwrap(), f64::NEG_INFINITY);
        assert_eq!(binom_pmf_log(3, 1.0, 3).unwrap(), 0.0);
        assert!(matches!(
            binom_pmf_log(3, 0.5, 4),
            Err(HsError::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn pmf_bound_examples() {
        let (a, p) = (1000.0, 0.01);
        let b = a * p * std::f64::consts::E;
        let v = binom_pmf_lower_bound_log(a, b, p, PmfBoundVariant::LargeB).unwrap();
        assert!((v + b).abs() < 1e-12);

        let v = binom_pmf_lower_bound_log(1e4, 100.0, 0.001, PmfBoundVariant::SmallB { c: 1.5 })
            .unwrap();
        let expect = -(100.0 * 10f64.ln() - 100.0 + 10.0);
        assert!((v - expect).abs() < 1e-12);
        assert!((v + 140.258_509_299_404_6).abs() < 1e-9);

        assert!(matches!(
            binom_pmf_lower_bound_log(1e4, 10.0, 0.001, PmfBoundVariant::SmallB { c: 1.5 }),
            Err(HsError::Domain(_))
        ));
    }

    #[test]
    fn sparse_target_examples() {
        let t = sparse_target_degree(10_000, 50, 0.02, 0.8).unwrap();
        assert_eq!(t.degree, 1);
        let t = sparse_target_degree(1_000_000, 100, 0.01, 2.0).unwrap();
        assert_eq!(t.degree, 2);
        let pmf = t.log_pmf.exp();
        assert!((pmf - 0.184_864_7).abs() < 1e-6, "{pmf}");
        assert!(pmf >= 1e-12);
        assert!(t.degree >= 1);
        assert!(matches!(
            sparse_target_degree(100, 100, 0.5, 1.0),
            Err(HsError::RegimeViolation(_))
        ));
    }

    #[test]
    fn monotonicity_examples() {
        assert_eq!(binomial_monotonicity_check(10, 0.5, 5).unwrap(), (true, true));
        assert_eq!(binomial_monotonicity_check(2, 0.5, 2).unwrap(), (true, true));
        assert_eq!(binomial_monotonicity_check(50, 0.02, 3).unwrap(), (true, true));
        assert!(binomial_monotonicity_check(10, 0.5, 4).is_err());
    }

    #[test]
    fn dmax_estimates() {
        let t = RegimeThresholds::default();
        let d = expected_dmax_estimate(100, 1000, 0.5, &t).unwrap();
        assert_eq!(d.formula_used, DmaxFormula::MpDense);
        assert_eq!(d.value, 500.0);
        assert!(d.g_n.is_none());

        let s = expected_dmax_estimate(10_000, 50, 0.02, &t).unwrap();
        assert_eq!(s.formula_used, DmaxFormula::GnSparse);
        let log_n = 10_000f64.ln();
        assert!((s.value - log_n / log_n.ln()).abs() < 1e-12);
        assert!((s.value - 4.148).abs() < 1e-3);

        assert!(matches!(
            expected_dmax_with(100, 1000, 0.5, &t, DmaxFormula::GnSparse),
            Err(HsError::Domain(_))
        ));
    }

    #[test]
    fn dmax_at_exact_threshold_uses_mp() {
        // mp = log n exactly: choose p so that m·p hits log n.
        let n = 1000usize;
        let m = 100usize;
        let p = (n as f64).ln() / m as f64;
        let d = expected_dmax_estimate(n, m, p, &RegimeThresholds::default()).unwrap();
        assert_eq!(d.regime.regime, Regime::Threshold);
        assert_eq!(d.formula_used, DmaxFormula::MpDense);
        assert!((d.value - (n as f64).ln()).abs() < 1e-12);
    }
}
