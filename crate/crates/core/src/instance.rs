//! Hitting-set instances: the incidence matrix `A ∈ {0,1}^{m×n}` with both
//! row and column bitset views.
//!
//! Row `i` is the membership vector of subset `S_i`; column `j` is the
//! inclusion set `I_j = {i : j ∈ S_i}`. All indices in this crate are 0-based.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::bitset::BitSet;
use crate::error::{HsError, Result};
use crate::rng::{bernoulli_word, BernoulliThreshold};

/// Identifier written to `gen_meta` for matrices drawn by [`generate`].
pub const GENERATOR_VERSION: &str = "splitmix64-ctr-v1";

/// Default cap on `2·m·n` bits held by the two bitset views (4 GiB).
pub const DEFAULT_MEMORY_BUDGET_BITS: u128 = 1 << 35;

#[derive(Debug, Clone, PartialEq)]
pub struct GenMeta {
    pub p: f64,
    pub seed: u64,
    pub generator_version: String,
}

#[derive(Clone, PartialEq)]
pub struct HsInstance {
    n: usize,
    m: usize,
    rows: Vec<BitSet>,
    cols: Vec<BitSet>,
    gen_meta: Option<GenMeta>,
}

impl std::fmt::Debug for HsInstance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("HsInstance")
            .field("m", &self.m)
            .field("n", &self.n)
            .field("gen_meta", &self.gen_meta)
            .finish_non_exhaustive()
    }
}

fn check_probability(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(HsError::InvalidProbability(p))
    }
}

/// Rebuilds the column view from the row view.
pub fn transpose(rows: &[BitSet], n: usize) -> Vec<BitSet> {
    let m = rows.len();
    let mut cols = vec![BitSet::new(m); n];
    for (i, row) in rows.iter().enumerate() {
        for j in row.iter() {
            cols[j].insert(i);
        }
    }
    cols
}

impl HsInstance {
    /// Builds an instance from its rows, each a bitset of width `n`.
    pub fn from_rows(n: usize, rows: Vec<BitSet>) -> Result<Self> {
        if n == 0 || rows.is_empty() {
            return Err(HsError::InvalidArgument(format!(
                "instance dimensions must be positive (m = {}, n = {n})",
                rows.len()
            )));
        }
        if let Some(bad) = rows.iter().position(|r| r.width() != n) {
            return Err(HsError::InvalidArgument(format!(
                "row {bad} has width {} but n = {n}",
                rows[bad].width()
            )));
        }
        let cols = transpose(&rows, n);
        Ok(HsInstance {
            n,
            m: rows.len(),
            rows,
            cols,
            gen_meta: None,
        })
    }

    /// Builds an instance from 0/1 strings, one per row.
    pub fn from_row_strings<S: AsRef<str>>(rows: &[S]) -> Result<Self> {
        let n = rows.first().map_or(0, |r| r.as_ref().len());
        let mut bits = Vec::with_capacity(rows.len());
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != n {
                return Err(HsError::InvalidArgument(format!(
                    "row {i} has length {} but row 0 has {n}",
                    r.len()
                )));
            }
            let mut b = BitSet::new(n);
            for (j, c) in r.bytes().enumerate() {
                match c {
                    b'1' => {
                        b.insert(j);
                    }
                    b'0' => {}
                    _ => {
                        return Err(HsError::InvalidArgument(format!(
                            "row {i} contains {:?}",
                            c as char
                        )))
                    }
                }
            }
            bits.push(b);
        }
        HsInstance::from_rows(n, bits)
    }

    pub fn identity(k: usize) -> Self {
        let rows = (0..k).map(|i| BitSet::from_indices(k, [i])).collect();
        HsInstance::from_rows(k, rows).expect("identity with k >= 1")
    }

    pub fn all_ones(m: usize, n: usize) -> Self {
        HsInstance::from_rows(n, vec![BitSet::full(n); m]).expect("positive dimensions")
    }

    /// The `k`-regular cyclic instance with `m = n` and row `i = {i, …, i+k−1 mod n}`.
    pub fn circulant(n: usize, k: usize) -> Self {
        assert!(k >= 1 && k <= n);
        let rows = (0..n)
            .map(|i| BitSet::from_indices(n, (0..k).map(|d| (i + d) % n)))
            .collect();
        HsInstance::from_rows(n, rows).expect("positive dimensions")
    }

    pub fn with_gen_meta(mut self, meta: Option<GenMeta>) -> Self {
        self.gen_meta = meta;
        self
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn rows(&self) -> &[BitSet] {
        &self.rows
    }

    #[inline]
    pub fn cols(&self) -> &[BitSet] {
        &self.cols
    }

    #[inline]
    pub fn row(&self, i: usize) -> &BitSet {
        &self.rows[i]
    }

    #[inline]
    pub fn col(&self, j: usize) -> &BitSet {
        &self.cols[j]
    }

    pub fn gen_meta(&self) -> Option<&GenMeta> {
        self.gen_meta.as_ref()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        self.rows[i].contains(j)
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(BitSet::count).sum()
    }

    /// Fraction of ones in the matrix.
    pub fn density(&self) -> f64 {
        self.nnz() as f64 / (self.m as f64 * self.n as f64)
    }

    /// Column degree `X_j = |I_j|`.
    pub fn degree(&self, j: usize) -> Result<usize> {
        self.cols
            .get(j)
            .map(BitSet::count)
            .ok_or(HsError::IndexOutOfRange {
                index: j,
                len: self.n,
            })
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.cols.iter().map(BitSet::count).collect()
    }

    /// Maximum column degree; zero iff the matrix is all-zero.
    pub fn dmax(&self) -> usize {
        self.cols.iter().map(BitSet::count).max().unwrap_or(0)
    }

    /// First all-zero row, if any. Such rows make the instance infeasible.
    pub fn empty_row(&self) -> Option<usize> {
        self.rows.iter().position(BitSet::is_empty)
    }

    /// Whether the columns in `set` hit every row (`Ax ≥ 1` for its indicator).
    pub fn is_hitting_set(&self, set: &[usize]) -> Result<bool> {
        let mut hit = BitSet::new(self.m);
        for &j in set {
            let col = self.cols.get(j).ok_or(HsError::IndexOutOfRange {
                index: j,
                len: self.n,
            })?;
            hit.union_with(col);
        }
        Ok(hit.count() == self.m)
    }

    /// Serializes to the line-oriented text format:
    /// `hs <m> <n>`, an optional `meta p=<f64> seed=<u64> gen=<str>` line,
    /// then `m` lines of `n` characters in `{0,1}`, each LF-terminated.
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(self.m * (self.n + 1) + 64);
        writeln!(out, "hs {} {}", self.m, self.n).unwrap();
        if let Some(meta) = &self.gen_meta {
            writeln!(
                out,
                "meta p={} seed={} gen={}",
                meta.p, meta.seed, meta.generator_version
            )
            .unwrap();
        }
        for row in &self.rows {
            let mut line = vec![b'0'; self.n];
            for j in row.iter() {
                line[j] = b'1';
            }
            out.push_str(std::str::from_utf8(&line).unwrap());
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        parse_text(text)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        parse_text(&text)
    }
}

fn parse_err(line: usize, column: usize, message: impl Into<String>) -> HsError {
    HsError::Parse {
        line,
        column,
        message: message.into(),
    }
}

fn parse_text(text: &str) -> Result<HsInstance> {
    if text.is_empty() {
        return Err(parse_err(1, 1, "empty input"));
    }
    if let Some(pos) = text.find('\r') {
        let line = text[..pos].matches('\n').count() + 1;
        let col = pos - text[..pos].rfind('\n').map_or(0, |p| p + 1) + 1;
        return Err(parse_err(line, col, "carriage return; LF line endings required"));
    }
    let body = text.strip_suffix('\n').unwrap_or(text);
    let mut lines = body.split('\n').enumerate().map(|(i, l)| (i + 1, l));

    let (ln, header) = lines.next().expect("split yields at least one item");
    let toks: Vec<&str> = header.split(' ').collect();
    if toks[0] != "hs" || toks.len() != 3 {
        return Err(parse_err(ln, 1, "expected header `hs <m> <n>`"));
    }
    let dim = |name: &str, tok: &str, col: usize| -> Result<usize> {
        match tok.parse::<usize>() {
            Ok(v) if v >= 1 => Ok(v),
            _ => Err(parse_err(ln, col, format!("invalid {name} {tok:?}"))),
        }
    };
    let m = dim("m", toks[1], 4)?;
    let n = dim("n", toks[2], 5 + toks[1].len())?;

    let mut meta = None;
    let mut rows = Vec::with_capacity(m);
    let mut pending = lines.next();
    if let Some((ln, line)) = pending {
        if let Some(rest) = line.strip_prefix("meta ") {
            meta = Some(parse_meta(ln, rest)?);
            pending = lines.next();
        }
    }
    while let Some((ln, line)) = pending {
        if rows.len() == m {
            return Err(parse_err(ln, 1, format!("more than {m} rows")));
        }
        if line.len() != n {
            return Err(parse_err(
                ln,
                line.len().min(n) + 1,
                format!("row has {} characters, expected {n}", line.len()),
            ));
        }
        let mut b = BitSet::new(n);
        for (j, c) in line.bytes().enumerate() {
            match c {
                b'1' => {
                    b.insert(j);
                }
                b'0' => {}
                _ => return Err(parse_err(ln, j + 1, format!("unexpected {:?}", c as char))),
            }
        }
        rows.push(b);
        pending = lines.next();
    }
    if rows.len() != m {
        let ln = 1 + usize::from(meta.is_some()) + rows.len() + 1;
        return Err(parse_err(ln, 1, format!("expected {m} rows, found {}", rows.len())));
    }
    Ok(HsInstance::from_rows(n, rows)?.with_gen_meta(meta))
}

fn parse_meta(ln: usize, rest: &str) -> Result<GenMeta> {
    let mut p = None;
    let mut seed = None;
    let mut gen = None;
    let mut col = 6;
    for tok in rest.split(' ') {
        let (key, value) = tok
            .split_once('=')
            .ok_or_else(|| parse_err(ln, col, format!("expected key=value, got {tok:?}")))?;
        let bad = || parse_err(ln, col + key.len() + 1, format!("invalid {key} {value:?}"));
        match key {
            "p" => p = Some(value.parse::<f64>().map_err(|_| bad())?),
            "seed" => seed = Some(value.parse::<u64>().map_err(|_| bad())?),
            "gen" if !value.is_empty() => gen = Some(value.to_owned()),
            _ => return Err(parse_err(ln, col, format!("unknown meta field {key:?}"))),
        }
        col += tok.len() + 1;
    }
    match (p, seed, gen) {
        (Some(p), Some(seed), Some(generator_version)) => {
            check_probability(p).map_err(|_| parse_err(ln, 6, "p outside [0,1]"))?;
            Ok(GenMeta {
                p,
                seed,
                generator_version,
            })
        }
        _ => Err(parse_err(ln, 1, "meta line requires p, seed and gen")),
    }
}

/// Draws `A_ij ~ Bernoulli(p)` iid from the counter-based stream keyed by `seed`.
pub fn generate(n: usize, m: usize, p: f64, seed: u64) -> Result<HsInstance> {
    generate_with_budget(n, m, p, seed, DEFAULT_MEMORY_BUDGET_BITS)
}

pub fn generate_with_budget(
    n: usize,
    m: usize,
    p: f64,
    seed: u64,
    budget_bits: u128,
) -> Result<HsInstance> {
    check_probability(p)?;
    if n == 0 || m == 0 {
        return Err(HsError::InvalidArgument(format!(
            "instance dimensions must be positive (m = {m}, n = {n})"
        )));
    }
    if 2 * (m as u128) * (n as u128) > budget_bits {
        return Err(HsError::DimensionOverflow {
            m,
            n,
            budget: budget_bits,
        });
    }
    let thr = BernoulliThreshold::new(p);
    let rows = (0..m)
        .map(|i| {
            let mut row = BitSet::new(n);
            fill_row(row.words_mut(), seed, i, n, thr);
            row
        })
        .collect();
    let inst = HsInstance::from_rows(n, rows)?;
    Ok(inst.with_gen_meta(Some(GenMeta {
        p,
        seed,
        generator_version: GENERATOR_VERSION.to_owned(),
    })))
}

fn fill_row(words: &mut [u64], seed: u64, row: usize, n: usize, thr: BernoulliThreshold) {
    for (b, w) in words.iter_mut().enumerate() {
        let nbits = (n - 64 * b).min(64);
        *w = bernoulli_word(seed, row, b, nbits, thr);
    }
}

/// Column degrees of `generate(n, m, p, seed)` without materializing the matrix.
pub fn generate_degrees(n: usize, m: usize, p: f64, seed: u64) -> Result<Vec<usize>> {
    check_probability(p)?;
    let thr = BernoulliThreshold::new(p);
    let mut deg = vec![0usize; n];
    let mut words = vec![0u64; n.div_ceil(64)];
    for i in 0..m {
        fill_row(&mut words, seed, i, n, thr);
        for (b, &w) in words.iter().enumerate() {
            let mut w = w;
            while w != 0 {
                deg[64 * b + w.trailing_zeros() as usize] += 1;
                w &= w - 1;
            }
        }
    }
    Ok(deg)
}

// ---------------------------------------------------------------------------
// Assumption diagnostics and regime classification

#[derive(Debug, Clone, PartialEq)]
pub struct ClauseCheck {
    pub clause: &'static str,
    /// `None` when the clause could not be evaluated (missing constants).
    pub satisfied: Option<bool>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AssumptionReport {
    pub clauses: Vec<ClauseCheck>,
}

impl AssumptionReport {
    pub fn get(&self, clause: &str) -> Option<&ClauseCheck> {
        self.clauses.iter().find(|c| c.clause == clause)
    }

    /// Both halves of `n^{−δ} ≤ p ≤ 1/2` hold.
    pub fn p_in_range(&self) -> bool {
        ["p_lower", "p_upper"]
            .iter()
            .all(|c| self.get(c).and_then(|c| c.satisfied) == Some(true))
    }

    pub fn all_satisfied(&self) -> bool {
        self.clauses.iter().all(|c| c.satisfied != Some(false))
    }
}

/// Constants `(c, C)` of the polynomial growth clause `c·n^c ≤ m ≤ C·n^C`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolyConstants {
    pub c: f64,
    pub big_c: f64,
}

const REL_SLACK: f64 = 1e-12;

/// Reports which distributional assumptions `(n, m, p)` satisfies. Never rejects.
pub fn assumption_check(
    n: usize,
    m: usize,
    p: f64,
    delta: f64,
    poly: Option<PolyConstants>,
) -> AssumptionReport {
    let nf = n as f64;
    let mf = m as f64;
    let mut clauses = Vec::new();
    let delta_ok = delta > 0.0 && delta < 1.0;
    clauses.push(ClauseCheck {
        clause: "delta_range",
        satisfied: Some(delta_ok),
        detail: format!("delta = {delta} must lie in (0,1)"),
    });
    let lower = nf.powf(-delta);
    clauses.push(ClauseCheck {
        clause: "p_lower",
        satisfied: Some(p >= lower * (1.0 - REL_SLACK)),
        detail: format!("p = {p} vs n^-delta = {lower}"),
    });
    clauses.push(ClauseCheck {
        clause: "p_upper",
        satisfied: Some(p <= 0.5),
        detail: format!("p = {p} vs 1/2"),
    });
    clauses.push(match poly {
        Some(PolyConstants { c, big_c }) => {
            let lo = c * nf.powf(c);
            let hi = big_c * nf.powf(big_c);
            ClauseCheck {
                clause: "m_poly",
                satisfied: Some(mf >= lo * (1.0 - REL_SLACK) && mf <= hi * (1.0 + REL_SLACK)),
                detail: format!("m = {m} vs [{lo}, {hi}]"),
            }
        }
        None => ClauseCheck {
            clause: "m_poly",
            satisfied: None,
            detail: "constants c, C not supplied".to_owned(),
        },
    });
    AssumptionReport { clauses }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeThresholds {
    /// Sparse when `mp < t_lo · log n`.
    pub t_lo: f64,
    /// Dense when `mp > t_hi · log n`.
    pub t_hi: f64,
    /// Polynomially dense when `log(mp) ≥ gamma0 · log n`.
    pub gamma0: f64,
}

impl Default for RegimeThresholds {
    fn default() -> Self {
        RegimeThresholds {
            t_lo: 0.5,
            t_hi: 2.0,
            gamma0: 0.1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    Sparse,
    Threshold,
    Dense,
    /// Dense with `log(mp) ≥ γ0 · log n`.
    PolyDense,
}

impl Regime {
    pub fn as_str(self) -> &'static str {
        match self {
            Regime::Sparse => "sparse",
            Regime::Threshold => "threshold",
            Regime::Dense => "dense",
            Regime::PolyDense => "polydense",
        }
    }

    pub fn is_dense(self) -> bool {
        matches!(self, Regime::Dense | Regime::PolyDense)
    }
}

impl std::str::FromStr for Regime {
    type Err = HsError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sparse" => Ok(Regime::Sparse),
            "threshold" => Ok(Regime::Threshold),
            "dense" => Ok(Regime::Dense),
            "polydense" => Ok(Regime::PolyDense),
            _ => Err(HsError::InvalidArgument(format!("unknown regime {s:?}"))),
        }
    }
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeLabel {
    pub regime: Regime,
    /// `mp / log n`.
    pub ratio: f64,
    pub polydense: bool,
}

pub fn classify_regime(
    n: usize,
    m: usize,
    p: f64,
    thresholds: &RegimeThresholds,
) -> Result<RegimeLabel> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(HsError::InvalidProbability(p));
    }
    if n < 2 {
        return Err(HsError::InvalidArgument(format!("classification needs n >= 2, got {n}")));
    }
    let log_n = (n as f64).ln();
    let mp = m as f64 * p;
    let ratio = mp / log_n;
    let polydense = mp.ln() >= thresholds.gamma0 * log_n;
    let regime = if ratio < thresholds.t_lo {
        Regime::Sparse
    } else if ratio > thresholds.t_hi {
        if polydense {
            Regime::PolyDense
        } else {
            Regime::Dense
        }
    } else {
        Regime::Threshold
    };
    Ok(RegimeLabel {
        regime,
        ratio,
        polydense,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generate_extremes() {
        let z = generate(4, 3, 0.0, 7).unwrap();
        assert_eq!(z.dmax(), 0);
        assert_eq!(z.nnz(), 0);
        let o = generate(4, 3, 1.0, 7).unwrap();
        assert!((0..4).all(|j| o.degree(j).unwrap() == 3));
        assert_eq!(o.gen_meta().unwrap().seed, 7);
    }

    #[test]
    fn generate_rejects_bad_inputs() {
        assert!(matches!(
            generate(4, 3, 1.5, 0),
            Err(HsError::InvalidProbability(_))
        ));
        assert!(matches!(
            generate(4, 3, -0.1, 0),
            Err(HsError::InvalidProbability(_))
        ));
        assert!(matches!(
            generate_with_budget(100, 100, 0.5, 0, 1000),
            Err(HsError::DimensionOverflow { .. })
        ));
    }

    #[test]
    fn degrees_match_generated_matrix() {
        let inst = generate(150, 37, 0.3, 11).unwrap();
        assert_eq!(inst.degrees(), generate_degrees(150, 37, 0.3, 11).unwrap());
    }

    #[test]
    fn identity_and_ones() {
        let id = HsInstance::identity(3);
        assert!((0..3).all(|j| id.degree(j).unwrap() == 1));
        assert_eq!(id.dmax(), 1);
        assert_eq!(HsInstance::all_ones(3, 4).dmax(), 3);
        assert!(matches!(
            id.degree(3),
            Err(HsError::IndexOutOfRange { index: 3, len: 3 })
        ));
    }

    #[test]
    fn hitting_set_checks() {
        let id = HsInstance::identity(3);
        assert!(id.is_hitting_set(&[0, 1, 2]).unwrap());
        assert!(!id.is_hitting_set(&[0, 1]).unwrap());
        assert!(id.is_hitting_set(&[5]).is_err());
        let c6 = HsInstance::circulant(6, 2);
        assert!(c6.is_hitting_set(&[0, 2, 4]).unwrap());
        assert!(!c6.is_hitting_set(&[0, 1, 3]).unwrap());
    }

    #[test]
    fn identity_text_format() {
        let id = HsInstance::identity(3);
        assert_eq!(id.to_text(), "hs 3 3\n100\n010\n001\n");
        assert_eq!(HsInstance::from_text(&id.to_text()).unwrap(), id);
    }

    #[test]
    fn parse_errors_carry_position() {
        assert!(matches!(
            HsInstance::from_text(""),
            Err(HsError::Parse { line: 1, .. })
        ));
        match HsInstance::from_text("hs 2 3\n101\n1x1\n") {
            Err(HsError::Parse { line, column, .. }) => assert_eq!((line, column), (3, 2)),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            HsInstance::from_text("hs 2 3\n101\n"),
            Err(HsError::Parse { line: 3, .. })
        ));
        assert!(matches!(
            HsInstance::from_text("hs 1 3\n101 \n"),
            Err(HsError::Parse { line: 2, .. })
        ));
        assert!(matches!(
            HsInstance::from_text("hs 1 3\r\n101\r\n"),
            Err(HsError::Parse { line: 1, column: 7, .. })
        ));
        assert!(HsInstance::from_text("hs 0 3\n").is_err());
        assert!(HsInstance::from_text("hs 1 2\nmeta p=0.5 seed=1\n11\n").is_err());
    }

    #[test]
    fn assumption_examples() {
        let r = assumption_check(100, 50, 0.1, 0.5, None);
        assert!(r.p_in_range());
        assert_eq!(r.get("m_poly").unwrap().satisfied, None);
        let r = assumption_check(100, 50, 0.6, 0.5, None);
        assert_eq!(r.get("p_upper").unwrap().satisfied, Some(false));
        assert!(!r.p_in_range());
        let r = assumption_check(100, 50, 0.001, 0.5, None);
        assert_eq!(r.get("p_lower").unwrap().satisfied, Some(false));
        let poly = PolyConstants { c: 0.5, big_c: 2.0 };
        let r = assumption_check(100, 50, 0.1, 0.5, Some(poly));
        assert_eq!(r.get("m_poly").unwrap().satisfied, Some(true));
        assert!(r.all_satisfied());
    }

    #[test]
    fn regime_examples() {
        let t = RegimeThresholds::default();
        let s = classify_regime(10_000, 50, 0.02, &t).unwrap();
        assert_eq!(s.regime, Regime::Sparse);
        assert!((s.ratio - 1.0 / 10_000f64.ln()).abs() < 1e-12);

        let d = classify_regime(100, 1000, 0.5, &t).unwrap();
        assert!(d.regime.is_dense());
        assert!(d.polydense);
        assert_eq!(d.regime, Regime::PolyDense);

        let n = 10f64.exp().round() as usize;
        let th = classify_regime(n, 100, 0.1, &t).unwrap();
        assert_eq!(th.regime, Regime::Threshold);

        assert!(matches!(
            classify_regime(100, 10, 0.0, &t),
            Err(HsError::InvalidProbability(_))
        ));
    }
}
