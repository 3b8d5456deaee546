//! Covering LP relaxation `min 1ᵀx  s.t.  Ax ≥ 1, 0 ≤ x ≤ 1` and its
//! closed-form bounds.
//!
//! The solver is a bounded-variable revised simplex on the standard form
//! `Ax − s = 1`, `0 ≤ x ≤ 1`, `s ≥ 0`. A basis is described by the basic
//! columns `XB` and the tight rows `T` (rows whose surplus is nonbasic);
//! the full `m×m` basis matrix is block triangular and only the `k×k`
//! block `M = A[T, XB]` has to be inverted. Its inverse is kept explicitly
//! and updated in `O(k²)` per pivot.
//!
//! The all-slack basis `x = 0` is dual feasible (every reduced cost is 1),
//! so the main phase is a dual simplex with dual steepest-edge pricing.
//! A primal pass with Devex pricing then removes any reduced-cost sign
//! errors left by round-off. If the dual phase breaks down the primal
//! method restarts from the indicator of the greedy cover.

use crate::error::{HsError, Result};
use crate::greedy::greedy;
use crate::instance::HsInstance;

/// Feasibility tolerance.
pub const FEAS_TOL: f64 = 1e-7;
/// Optimality tolerance on reduced costs.
pub const DJ_TOL: f64 = 1e-9;
/// `solve_lp` refuses instances with more than this many matrix entries.
pub const LP_SIZE_LIMIT: usize = 25_000_000;

const PIVOT_TOL: f64 = 1e-9;
const DUAL_PIVOT_TOL: f64 = 1e-7;
const NONE: usize = usize::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    IterationLimit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub value: f64,
    pub status: LpStatus,
    /// Largest violation of `Ax ≥ 1` or `0 ≤ x ≤ 1`.
    pub max_constraint_violation: f64,
    /// Pivots performed, bound flips included.
    pub iterations: usize,
    /// Row duals `y ≥ 0` of the final basis.
    pub duals: Vec<f64>,
    /// `Σ y_i − Σ_j max(0, (Aᵀy)_j − 1)` at the final basis.
    pub dual_value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LpOptions {
    pub tol: f64,
    /// Pivot budget; `None` means `50·(m+n)`.
    pub max_iters: Option<usize>,
    /// Bypass [`LP_SIZE_LIMIT`].
    pub allow_large: bool,
}

impl Default for LpOptions {
    fn default() -> Self {
        LpOptions {
            tol: FEAS_TOL,
            max_iters: None,
            allow_large: false,
        }
    }
}

pub fn solve_lp(inst: &HsInstance, tol: f64, max_iters: Option<usize>) -> Result<LpSolution> {
    solve_lp_with(
        inst,
        &LpOptions {
            tol,
            max_iters,
            allow_large: false,
        },
    )
}

pub fn solve_lp_with(inst: &HsInstance, opts: &LpOptions) -> Result<LpSolution> {
    if !(opts.tol > 0.0) {
        return Err(HsError::InvalidArgument(format!(
            "tolerance must be positive, got {}",
            opts.tol
        )));
    }
    let (m, n) = (inst.m(), inst.n());
    let cells = m.saturating_mul(n);
    if cells > LP_SIZE_LIMIT && !opts.allow_large {
        return Err(HsError::TooLarge {
            n: cells,
            limit: LP_SIZE_LIMIT,
        });
    }
    if inst.empty_row().is_some() {
        return Ok(LpSolution {
            x: vec![0.0; n],
            value: 0.0,
            status: LpStatus::Infeasible,
            max_constraint_violation: 1.0,
            iterations: 0,
            duals: vec![0.0; m],
            dual_value: 0.0,
        });
    }
    let max_iters = opts.max_iters.unwrap_or(50 * (m + n));
    let mut s = Simplex::new(inst, opts.tol, &[]);
    let status = match s.run_dual(max_iters) {
        DualOutcome::PrimalFeasible => s.run(max_iters),
        DualOutcome::IterationLimit => LpStatus::IterationLimit,
        DualOutcome::Stalled => {
            let done = s.iters;
            s = Simplex::new(inst, opts.tol, &greedy(inst)?.chosen);
            s.iters = done;
            s.run(max_iters)
        }
    };
    Ok(s.into_solution(status))
}

struct Simplex {
    m: usize,
    n: usize,
    cols: Vec<Vec<u32>>,
    rows: Vec<Vec<u32>>,
    feas_tol: f64,
    x: Vec<f64>,
    /// Row activities `Ax`.
    act: Vec<f64>,
    xb: Vec<usize>,
    xpos: Vec<usize>,
    t: Vec<usize>,
    tpos: Vec<usize>,
    /// `M⁻¹`, indexed `[XB position][T position]`.
    inv: Vec<Vec<f64>>,
    /// Column sums of `M⁻¹`, i.e. the duals of the tight rows.
    ycol: Vec<f64>,
    /// Devex reference weights of the `x_j` and of the surpluses.
    wx: Vec<f64>,
    ws: Vec<f64>,
    /// Dual steepest-edge weights `‖e_pᵀB⁻¹‖²` of basic `x_j` and basic
    /// surpluses.
    bx: Vec<f64>,
    bs: Vec<f64>,
    y: Vec<f64>,
    dj: Vec<f64>,
    iters: usize,
    since_refactor: usize,
    // scratch
    gx: Vec<f64>,
    ga: Vec<f64>,
}

enum DualOutcome {
    PrimalFeasible,
    IterationLimit,
    Stalled,
}

#[derive(Debug, Clone, Copy)]
enum Entering {
    X { j: usize, sigma: f64 },
    S { i: usize },
}

#[derive(Debug, Clone, Copy)]
enum Leaving {
    Flip,
    X { c: usize, to_upper: bool },
    S { i: usize },
}

impl Simplex {
    fn new(inst: &HsInstance, feas_tol: f64, start: &[usize]) -> Self {
        let (m, n) = (inst.m(), inst.n());
        let cols: Vec<Vec<u32>> = inst
            .cols()
            .iter()
            .map(|c| c.iter().map(|i| i as u32).collect())
            .collect();
        let rows: Vec<Vec<u32>> = inst
            .rows()
            .iter()
            .map(|r| r.iter().map(|j| j as u32).collect())
            .collect();
        let mut x = vec![0.0; n];
        let mut act = vec![0.0; m];
        for &j in start {
            x[j] = 1.0;
            for &i in &cols[j] {
                act[i as usize] += 1.0;
            }
        }
        let mut s = Simplex {
            m,
            n,
            cols,
            rows,
            feas_tol,
            x,
            act,
            xb: Vec::new(),
            xpos: vec![NONE; n],
            t: Vec::new(),
            tpos: vec![NONE; m],
            inv: Vec::new(),
            ycol: Vec::new(),
            wx: vec![1.0; n],
            ws: vec![1.0; m],
            bx: vec![1.0; n],
            bs: vec![1.0; m],
            y: vec![0.0; m],
            dj: vec![1.0; n],
            iters: 0,
            since_refactor: 0,
            gx: Vec::new(),
            ga: vec![0.0; m],
        };
        s.reset_devex();
        s
    }

    fn reset_devex(&mut self) {
        for (w, c) in self.wx.iter_mut().zip(&self.cols) {
            *w = 1.0 + c.len() as f64;
        }
        self.ws.iter_mut().for_each(|v| *v = 2.0);
    }

    fn refactor_interval(&self) -> usize {
        (2 * self.xb.len()).max(256)
    }

    /// Dual simplex from a dual feasible basis until primal feasibility.
    fn run_dual(&mut self, max_iters: usize) -> DualOutcome {
        let bland_after = 10 * (self.m + self.n);
        loop {
            if self.since_refactor >= self.refactor_interval() {
                self.refactor();
            }
            self.price();
            let bland = self.iters >= bland_after;
            let leaving = match self.dual_leaving(bland) {
                Some(l) => l,
                None if self.since_refactor > 0 => {
                    self.refactor();
                    self.price();
                    match self.dual_leaving(bland) {
                        Some(l) => l,
                        None => return DualOutcome::PrimalFeasible,
                    }
                }
                None => return DualOutcome::PrimalFeasible,
            };
            if self.iters >= max_iters {
                return DualOutcome::IterationLimit;
            }
            if !self.dual_pivot(leaving, bland) {
                return DualOutcome::Stalled;
            }
            self.iters += 1;
            self.since_refactor += 1;
        }
    }

    /// Primal simplex from a primal feasible basis until optimality.
    fn run(&mut self, max_iters: usize) -> LpStatus {
        let bland_after = 10 * (self.m + self.n);
        loop {
            if self.since_refactor >= self.refactor_interval() {
                self.refactor();
            }
            self.price();
            let entering = match self.choose_entering(self.iters >= bland_after) {
                Some(e) => e,
                None if self.since_refactor > 0 => {
                    self.refactor();
                    self.price();
                    match self.choose_entering(self.iters >= bland_after) {
                        Some(e) => e,
                        None => return LpStatus::Optimal,
                    }
                }
                None => return LpStatus::Optimal,
            };
            if self.iters >= max_iters {
                return LpStatus::IterationLimit;
            }
            self.pivot(entering, self.iters >= bland_after);
            self.iters += 1;
            self.since_refactor += 1;
        }
    }

    /// Duals `y_T = M⁻ᵀ 1` and reduced costs `d_j = 1 − (Aᵀy)_j`.
    fn price(&mut self) {
        self.y.iter_mut().for_each(|v| *v = 0.0);
        for (r, &i) in self.t.iter().enumerate() {
            self.y[i] = self.ycol[r];
        }
        self.dj.iter_mut().for_each(|v| *v = 1.0);
        for &i in &self.t {
            let yi = self.y[i];
            for &j in &self.rows[i] {
                self.dj[j as usize] -= yi;
            }
        }
        for &j in &self.xb {
            self.dj[j] = 0.0;
        }
    }

    fn choose_entering(&self, bland: bool) -> Option<Entering> {
        let mut best: Option<(f64, Entering)> = None;
        for j in 0..self.n {
            if self.xpos[j] != NONE {
                continue;
            }
            let d = self.dj[j];
            let sigma = if self.x[j] == 0.0 && d < -DJ_TOL {
                1.0
            } else if self.x[j] == 1.0 && d > DJ_TOL {
                -1.0
            } else {
                continue;
            };
            let e = Entering::X { j, sigma };
            if bland {
                return Some(e);
            }
            let score = d * d / self.wx[j];
            if best.map_or(true, |(b, _)| score > b) {
                best = Some((score, e));
            }
        }
        for i in 0..self.m {
            if self.tpos[i] == NONE || self.y[i] >= -DJ_TOL {
                continue;
            }
            let e = Entering::S { i };
            if bland {
                return Some(e);
            }
            let score = self.y[i] * self.y[i] / self.ws[i];
            if best.map_or(true, |(b, _)| score > b) {
                best = Some((score, e));
            }
        }
        best.map(|(_, e)| e)
    }

    /// `M⁻¹ A[T, j]`.
    fn ftran_col(&self, j: usize) -> Vec<f64> {
        let rs: Vec<usize> = self.cols[j]
            .iter()
            .map(|&i| self.tpos[i as usize])
            .filter(|&r| r != NONE)
            .collect();
        self.inv
            .iter()
            .map(|row| rs.iter().map(|&r| row[r]).sum())
            .collect()
    }

    /// `A[i, XB] M⁻¹`.
    fn btran_row(&self, i: usize) -> Vec<f64> {
        let mut v = vec![0.0; self.t.len()];
        for &j in &self.rows[i] {
            let c = self.xpos[j as usize];
            if c != NONE {
                for (acc, e) in v.iter_mut().zip(&self.inv[c]) {
                    *acc += e;
                }
            }
        }
        v
    }

    /// `ga = A[:, XB] g`.
    fn spread(&mut self, g: &[f64]) {
        self.ga.iter_mut().for_each(|v| *v = 0.0);
        for (c, &w) in g.iter().enumerate() {
            if w != 0.0 {
                for &i in &self.cols[self.xb[c]] {
                    self.ga[i as usize] += w;
                }
            }
        }
    }

    /// Direction per unit step θ of the entering variable: `Δx_B = θ·gx`,
    /// `Δ(Ax) = θ·ga`. Returns `M⁻¹ A[T, j]` for an entering column.
    fn direction(&mut self, e: Entering) -> Option<Vec<f64>> {
        match e {
            Entering::X { j, sigma } => {
                let w = self.ftran_col(j);
                self.gx = w.iter().map(|v| -sigma * v).collect();
                let gx = std::mem::take(&mut self.gx);
                self.spread(&gx);
                self.gx = gx;
                for &i in &self.cols[j] {
                    self.ga[i as usize] += sigma;
                }
                Some(w)
            }
            Entering::S { i } => {
                let r = self.tpos[i];
                let gx: Vec<f64> = self.inv.iter().map(|row| row[r]).collect();
                self.spread(&gx);
                self.gx = gx;
                None
            }
        }
    }

    fn step(&mut self, e: Entering, theta: f64) {
        if theta == 0.0 {
            return;
        }
        for (c, &g) in self.gx.iter().enumerate() {
            self.x[self.xb[c]] += theta * g;
        }
        for (a, &g) in self.act.iter_mut().zip(&self.ga) {
            *a += theta * g;
        }
        if let Entering::X { j, sigma } = e {
            self.x[j] += sigma * theta;
        }
    }

    fn pivot(&mut self, e: Entering, bland: bool) {
        let w = self.direction(e);

        // Ratio test. Keys order variables as x_0..x_{n-1}, s_0..s_{m-1}.
        let mut cand: Vec<(f64, usize, f64, Leaving)> = Vec::new();
        if let Entering::X { .. } = e {
            cand.push((1.0, self.key_of_entering(e), 1.0, Leaving::Flip));
        }
        for (c, &g) in self.gx.iter().enumerate() {
            let xj = self.x[self.xb[c]];
            if g > PIVOT_TOL {
                cand.push((((1.0 - xj) / g).max(0.0), self.xb[c], g, Leaving::X { c, to_upper: true }));
            } else if g < -PIVOT_TOL {
                cand.push(((xj / -g).max(0.0), self.xb[c], -g, Leaving::X { c, to_upper: false }));
            }
        }
        for i in 0..self.m {
            if self.tpos[i] != NONE {
                continue;
            }
            let g = self.ga[i];
            if g < -PIVOT_TOL {
                let slack = (self.act[i] - 1.0).max(0.0);
                cand.push((slack / -g, self.n + i, -g, Leaving::S { i }));
            }
        }
        let theta = cand.iter().map(|c| c.0).fold(f64::INFINITY, f64::min);
        debug_assert!(theta.is_finite());
        let near = theta + 1e-12;
        let (_, _, _, leaving) = *cand
            .iter()
            .filter(|c| c.0 <= near)
            .min_by(|a, b| {
                if bland {
                    a.1.cmp(&b.1)
                } else {
                    b.2.total_cmp(&a.2).then(a.1.cmp(&b.1))
                }
            })
            .expect("bounded LP");
        self.step(e, theta);
        if !matches!(leaving, Leaving::Flip) {
            self.update_weights(e, leaving);
        }
        self.change_basis(e, leaving, w, None);
    }

    /// Basic variable maximising infeasibility² over its steepest-edge
    /// weight (lowest key under Bland's rule).
    fn dual_leaving(&self, bland: bool) -> Option<Leaving> {
        let tol = self.feas_tol;
        let mut best: Option<(f64, usize, Leaving)> = None;
        let mut offer = |score: f64, key: usize, l: Leaving| {
            let better = match best {
                None => true,
                Some((bv, bk, _)) => {
                    if bland {
                        key < bk
                    } else {
                        score > bv || (score == bv && key < bk)
                    }
                }
            };
            if better {
                best = Some((score, key, l));
            }
        };
        for (c, &j) in self.xb.iter().enumerate() {
            let v = self.x[j];
            if v < -tol {
                offer(v * v / self.bx[j], j, Leaving::X { c, to_upper: false });
            } else if v > 1.0 + tol {
                let e = v - 1.0;
                offer(e * e / self.bx[j], j, Leaving::X { c, to_upper: true });
            }
        }
        for i in 0..self.m {
            let e = 1.0 - self.act[i];
            if self.tpos[i] == NONE && e > tol {
                offer(e * e / self.bs[i], self.n + i, Leaving::S { i });
            }
        }
        best.map(|(_, _, l)| l)
    }

    /// Row of `B⁻¹[A, −I]` for a basic variable: entries for the `x_j`, and
    /// `ρ` in tight-row coordinates (the entry for surplus `s_h`, `h ∈ T`,
    /// is `−ρ[pos h]`).
    fn pivot_row(&self, leaving: Leaving) -> (Vec<f64>, Vec<f64>) {
        let (rho, own_row) = match leaving {
            Leaving::S { i } => (self.btran_row(i), Some(i)),
            Leaving::X { c, .. } => (self.inv[c].clone(), None),
            Leaving::Flip => unreachable!(),
        };
        let mut alpha = vec![0.0; self.n];
        for (r, &i) in self.t.iter().enumerate() {
            let v = rho[r];
            if v != 0.0 {
                for &j in &self.rows[i] {
                    alpha[j as usize] += v;
                }
            }
        }
        if let Some(i) = own_row {
            for &j in &self.rows[i] {
                alpha[j as usize] -= 1.0;
            }
        }
        (alpha, rho)
    }

    /// Devex reference weights after a basis change.
    fn update_weights(&mut self, e: Entering, leaving: Leaving) {
        let (alpha, rho) = self.pivot_row(leaving);
        let (aq, wq) = match e {
            Entering::X { j, .. } => (alpha[j], self.wx[j]),
            Entering::S { i } => (-rho[self.tpos[i]], self.ws[i]),
        };
        if aq.abs() <= PIVOT_TOL {
            return;
        }
        for j in 0..self.n {
            if self.xpos[j] == NONE && alpha[j] != 0.0 {
                let r = alpha[j] / aq;
                self.wx[j] = self.wx[j].max(r * r * wq);
            }
        }
        for (r, &h) in self.t.iter().enumerate() {
            if rho[r] != 0.0 {
                let q = rho[r] / aq;
                self.ws[h] = self.ws[h].max(q * q * wq);
            }
        }
        let wl = (wq / (aq * aq)).max(1.0);
        match leaving {
            Leaving::X { c, .. } => self.wx[self.xb[c]] = wl,
            Leaving::S { i } => self.ws[i] = wl,
            Leaving::Flip => {}
        }
    }

    /// One dual simplex pivot on a primal infeasible basic variable.
    /// Returns `false` if no entering variable exists.
    fn dual_pivot(&mut self, leaving: Leaving, bland: bool) -> bool {
        let (alpha, rho) = self.pivot_row(leaving);
        // The leaving variable moves by −α·Δ when a nonbasic moves by Δ.
        let raise = match leaving {
            Leaving::S { .. } => true,
            Leaving::X { to_upper, .. } => !to_upper,
            Leaving::Flip => unreachable!(),
        };
        // (|d|, |α|, key, entering)
        let mut cands: Vec<(f64, f64, usize, Entering)> = Vec::new();
        for j in 0..self.n {
            if self.xpos[j] != NONE {
                continue;
            }
            let a = alpha[j];
            if a.abs() <= DUAL_PIVOT_TOL {
                continue;
            }
            let at_lower = self.x[j] == 0.0;
            if raise == ((a < 0.0) == at_lower) {
                let sigma = if at_lower { 1.0 } else { -1.0 };
                cands.push(((sigma * self.dj[j]).max(0.0), a.abs(), j, Entering::X { j, sigma }));
            }
        }
        for (r, &h) in self.t.iter().enumerate() {
            let a = -rho[r];
            if a.abs() > DUAL_PIVOT_TOL && raise == (a < 0.0) {
                cands.push((self.y[h].max(0.0), a.abs(), self.n + h, Entering::S { i: h }));
            }
        }
        // Harris two-pass ratio test.
        let bound = cands
            .iter()
            .map(|&(d, a, _, _)| (d + DJ_TOL) / a)
            .fold(f64::INFINITY, f64::min);
        let Some(&(_, _, _, e)) = cands
            .iter()
            .filter(|&&(d, a, _, _)| d / a <= bound)
            .min_by(|x, y| {
                if bland {
                    x.2.cmp(&y.2)
                } else {
                    y.1.total_cmp(&x.1).then(x.2.cmp(&y.2))
                }
            })
        else {
            return false;
        };
        let w = self.direction(e);
        let (value, rate, target) = match leaving {
            Leaving::S { i } => (self.act[i], self.ga[i], 1.0),
            Leaving::X { c, to_upper } => {
                (self.x[self.xb[c]], self.gx[c], if to_upper { 1.0 } else { 0.0 })
            }
            Leaving::Flip => unreachable!(),
        };
        let bp = match leaving {
            Leaving::S { .. } => 1.0 + dot(&rho, &rho),
            _ => dot(&rho, &rho),
        };
        let old_xb = self.xb.clone();
        let theta = ((target - value) / rate).max(0.0);
        self.step(e, theta);
        let tau = self.change_basis(e, leaving, w, Some(&rho));
        self.update_dse(leaving, e, bp, rate, &tau, &old_xb);
        true
    }

    /// Steepest-edge weight recurrence `β_i ← β_i − 2(α_i/α_p)τ_i +
    /// (α_i/α_p)²β_p` with `τ = B⁻¹ρ_p`, applied after the basis change;
    /// the entering variable gets `β_p/α_p²`. `gx`/`ga` still hold the
    /// pivot column and `tau`, `old_xb` refer to the old basis positions.
    fn update_dse(
        &mut self,
        leaving: Leaving,
        e: Entering,
        bp: f64,
        rate: f64,
        tau: &[f64],
        old_xb: &[usize],
    ) {
        let (skip_c, skip_i) = match leaving {
            Leaving::S { i } => (NONE, i),
            Leaving::X { c, .. } => (c, NONE),
            Leaving::Flip => unreachable!(),
        };
        let mut ta = vec![0.0; self.m];
        for (&tc, &j) in tau.iter().zip(old_xb) {
            if tc != 0.0 {
                for &i in &self.cols[j] {
                    ta[i as usize] += tc;
                }
            }
        }
        for (c, &g) in self.gx.iter().enumerate() {
            if c != skip_c && g != 0.0 {
                let r = g / rate;
                let j = old_xb[c];
                self.bx[j] = (self.bx[j] - 2.0 * r * tau[c] + r * r * bp).max(1e-12);
            }
        }
        for h in 0..self.m {
            let g = self.ga[h];
            if self.tpos[h] == NONE && h != skip_i && g != 0.0 {
                let r = g / rate;
                self.bs[h] = (self.bs[h] - 2.0 * r * ta[h] + r * r * bp).max(1.0);
            }
        }
        let bq = bp / (rate * rate);
        match e {
            Entering::X { j, .. } => self.bx[j] = bq.max(1e-12),
            Entering::S { i } => self.bs[i] = bq.max(1.0),
        }
    }

    /// Applies the basis change. With `rho` (the pivot row's tight-row
    /// part) also returns `τ_XB = M⁻¹ρ` for the old basis, indexed by old
    /// position.
    fn change_basis(
        &mut self,
        e: Entering,
        leaving: Leaving,
        w: Option<Vec<f64>>,
        rho: Option<&[f64]>,
    ) -> Vec<f64> {
        let mut tau = vec![0.0; if rho.is_some() { self.xb.len() } else { 0 }];
        match (e, leaving) {
            (Entering::X { j, sigma }, Leaving::Flip) => {
                self.x[j] = if sigma > 0.0 { 1.0 } else { 0.0 };
            }
            (Entering::X { j, .. }, Leaving::S { i }) => {
                let w = w.unwrap();
                let v = match rho {
                    Some(r) => r.to_vec(),
                    None => self.btran_row(i),
                };
                let delta = if self.cols[j].binary_search(&(i as u32)).is_ok() { 1.0 } else { 0.0 };
                let b_dot_w: f64 = self.rows[i]
                    .iter()
                    .filter_map(|&jj| {
                        let c = self.xpos[jj as usize];
                        (c != NONE).then(|| w[c])
                    })
                    .sum();
                self.grow(j, i, &w, &v, delta - b_dot_w, rho, &mut tau);
                self.act[i] = 1.0;
            }
            (Entering::X { j, .. }, Leaving::X { c, to_upper }) => {
                let w = w.unwrap();
                let l = self.xb[c];
                self.x[l] = if to_upper { 1.0 } else { 0.0 };
                self.replace_col(c, j, &w, rho, &mut tau);
            }
            (Entering::S { i }, Leaving::S { i: h }) => {
                let r = self.tpos[i];
                let v = match rho {
                    Some(r) => r.to_vec(),
                    None => self.btran_row(h),
                };
                self.replace_row(r, h, &v, rho, &mut tau);
                self.act[h] = 1.0;
            }
            (Entering::S { i }, Leaving::X { c, to_upper }) => {
                let r = self.tpos[i];
                let l = self.xb[c];
                self.x[l] = if to_upper { 1.0 } else { 0.0 };
                self.shrink(c, r, rho, &mut tau);
            }
            (Entering::S { .. }, Leaving::Flip) => unreachable!(),
        }
        tau
    }

    fn key_of_entering(&self, e: Entering) -> usize {
        match e {
            Entering::X { j, .. } => j,
            Entering::S { i } => self.n + i,
        }
    }

    /// Borders `M` with column `A[T, j]`, row `A[i, XB]` and corner `A[i, j]`;
    /// `s` is the Schur complement `A[i,j] − A[i,XB] M⁻¹ A[T,j]`.
    #[allow(clippy::too_many_arguments)]
    fn grow(
        &mut self,
        j: usize,
        i: usize,
        w: &[f64],
        v: &[f64],
        s: f64,
        rho: Option<&[f64]>,
        tau: &mut [f64],
    ) {
        let k = self.xb.len();
        let mut ycol = vec![0.0; k + 1];
        for c in 0..k {
            let wc = w[c] / s;
            let row = &mut self.inv[c];
            tau[c] = update_row(row, wc, v, rho, &mut ycol[..k]);
            row.push(-wc);
            ycol[k] -= wc;
        }
        let mut last: Vec<f64> = v.iter().map(|vr| -vr / s).collect();
        last.push(1.0 / s);
        add_row(&mut ycol, &last);
        self.inv.push(last);
        self.ycol = ycol;
        self.xpos[j] = k;
        self.xb.push(j);
        self.tpos[i] = k;
        self.t.push(i);
    }

    /// Replaces basic column at position `c` by column `j`, `w = M⁻¹ A[T, j]`.
    fn replace_col(&mut self, c: usize, j: usize, w: &[f64], rho: Option<&[f64]>, tau: &mut [f64]) {
        let piv = w[c];
        if let Some(rho) = rho {
            tau[c] = dot(&self.inv[c], rho);
        }
        let pivot_row: Vec<f64> = self.inv[c].iter().map(|v| v / piv).collect();
        let mut ycol = pivot_row.clone();
        for (cc, row) in self.inv.iter_mut().enumerate() {
            if cc != c {
                tau[cc] = update_row(row, -w[cc], &pivot_row, rho, &mut ycol);
            }
        }
        self.ycol = ycol;
        self.inv[c] = pivot_row;
        self.xpos[self.xb[c]] = NONE;
        self.xb[c] = j;
        self.xpos[j] = c;
    }

    /// Replaces tight row at position `r` by row `h`, `v = A[h, XB] M⁻¹`.
    fn replace_row(&mut self, r: usize, h: usize, v: &[f64], rho: Option<&[f64]>, tau: &mut [f64]) {
        let piv = v[r];
        let mut ycol = vec![0.0; self.t.len()];
        for (c, row) in self.inv.iter_mut().enumerate() {
            let f = row[r] / piv;
            tau[c] = update_row(row, -f, v, rho, &mut ycol);
            ycol[r] += f - row[r];
            row[r] = f;
        }
        self.ycol = ycol;
        self.tpos[self.t[r]] = NONE;
        self.t[r] = h;
        self.tpos[h] = r;
    }

    /// Drops basic column position `c` and tight row position `r`.
    fn shrink(&mut self, c: usize, r: usize, rho: Option<&[f64]>, tau: &mut [f64]) {
        let piv = self.inv[c][r];
        let pivot_row = self.inv.swap_remove(c);
        if let Some(rho) = rho {
            tau[c] = dot(&pivot_row, rho);
        }
        let mut ycol = vec![0.0; self.t.len()];
        let last = self.inv.len();
        for (cc, row) in self.inv.iter_mut().enumerate() {
            // swap_remove moved the old last row into slot `c`.
            let old = if cc == c { last } else { cc };
            let f = row[r] / piv;
            let d = update_row(row, -f, &pivot_row, rho, &mut ycol);
            if !tau.is_empty() {
                tau[old] = d;
            }
            row.swap_remove(r);
        }
        ycol.swap_remove(r);
        self.ycol = ycol;
        let gone = self.xb.swap_remove(c);
        self.xpos[gone] = NONE;
        if c < self.xb.len() {
            self.xpos[self.xb[c]] = c;
        }
        let gone = self.t.swap_remove(r);
        self.tpos[gone] = NONE;
        if r < self.t.len() {
            self.tpos[self.t[r]] = r;
        }
    }

    /// Recomputes `M⁻¹`, the basic values and the row activities from scratch.
    fn refactor(&mut self) {
        self.since_refactor = 0;
        self.reset_devex();
        let k = self.xb.len();
        if k > 0 {
            let mut a = vec![vec![0.0; k]; k];
            for (c, &j) in self.xb.iter().enumerate() {
                for &i in &self.cols[j] {
                    let r = self.tpos[i as usize];
                    if r != NONE {
                        a[r][c] = 1.0;
                    }
                }
            }
            if let Some(inv) = invert(a) {
                self.inv = inv;
            }
            self.ycol = vec![0.0; k];
            for row in &self.inv {
                for (acc, v) in self.ycol.iter_mut().zip(row) {
                    *acc += v;
                }
            }
            let mut rhs = vec![1.0; self.t.len()];
            for j in 0..self.n {
                if self.xpos[j] == NONE && self.x[j] == 1.0 {
                    for &i in &self.cols[j] {
                        let r = self.tpos[i as usize];
                        if r != NONE {
                            rhs[r] -= 1.0;
                        }
                    }
                }
            }
            for c in 0..k {
                let v: f64 = self.inv[c].iter().zip(&rhs).map(|(a, b)| a * b).sum();
                self.x[self.xb[c]] = v;
            }
        }
        self.act.iter_mut().for_each(|v| *v = 0.0);
        for j in 0..self.n {
            let xj = self.x[j];
            if xj != 0.0 {
                for &i in &self.cols[j] {
                    self.act[i as usize] += xj;
                }
            }
        }
    }

    fn into_solution(mut self, status: LpStatus) -> LpSolution {
        if status == LpStatus::Optimal && self.since_refactor > 0 {
            self.refactor();
            self.price();
        }
        let mut viol: f64 = 0.0;
        for &xj in &self.x {
            viol = viol.max(-xj).max(xj - 1.0);
        }
        for &a in &self.act {
            viol = viol.max(1.0 - a);
        }
        let value = self.x.iter().sum();
        let duals: Vec<f64> = self.y.iter().map(|&v| v.max(0.0)).collect();
        let mut aty = vec![0.0; self.n];
        let mut dual_value = 0.0;
        for (i, &yi) in duals.iter().enumerate() {
            dual_value += yi;
            if yi != 0.0 {
                for &j in &self.rows[i] {
                    aty[j as usize] += yi;
                }
            }
        }
        dual_value -= aty.iter().map(|&v| (v - 1.0).max(0.0)).sum::<f64>();
        LpSolution {
            x: self.x,
            value,
            status,
            max_constraint_violation: viol.max(0.0),
            iterations: self.iters,
            duals,
            dual_value,
        }
    }
}

fn add_row(acc: &mut [f64], row: &[f64]) {
    for (a, v) in acc.iter_mut().zip(row) {
        *a += v;
    }
}

/// `row += f·v`, adding the updated row into `ysum`. Returns the dot
/// product of the old row with `rho` (0 without `rho`).
fn update_row(row: &mut [f64], f: f64, v: &[f64], rho: Option<&[f64]>, ysum: &mut [f64]) -> f64 {
    let Some(rho) = rho else {
        for ((a, vv), y) in row.iter_mut().zip(v).zip(ysum.iter_mut()) {
            *a += f * vv;
            *y += *a;
        }
        return 0.0;
    };
    let k = row.len();
    let (v, rho, ysum) = (&v[..k], &rho[..k], &mut ysum[..k]);
    let mut acc = [0.0; 4];
    let full = k - k % 4;
    for s in (0..full).step_by(4) {
        for l in 0..4 {
            let old = row[s + l];
            acc[l] += old * rho[s + l];
            let new = old + f * v[s + l];
            row[s + l] = new;
            ysum[s + l] += new;
        }
    }
    let mut d = acc.iter().sum::<f64>();
    for t in full..k {
        let old = row[t];
        d += old * rho[t];
        row[t] = old + f * v[t];
        ysum[t] += row[t];
    }
    d
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = [0.0; 4];
    let (ca, cb) = (a.chunks_exact(4), b.chunks_exact(4));
    let tail: f64 = ca.remainder().iter().zip(cb.remainder()).map(|(x, y)| x * y).sum();
    for (x, y) in ca.zip(cb) {
        for l in 0..4 {
            acc[l] += x[l] * y[l];
        }
    }
    acc.iter().sum::<f64>() + tail
}

/// Gauss-Jordan inverse with partial pivoting; `None` if singular.
fn invert(mut a: Vec<Vec<f64>>) -> Option<Vec<Vec<f64>>> {
    let k = a.len();
    let mut inv: Vec<Vec<f64>> = (0..k)
        .map(|i| {
            let mut r = vec![0.0; k];
            r[i] = 1.0;
            r
        })
        .collect();
    for col in 0..k {
        let p = (col..k).max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))?;
        if a[p][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, p);
        inv.swap(col, p);
        let d = a[col][col];
        a[col].iter_mut().for_each(|v| *v /= d);
        inv[col].iter_mut().for_each(|v| *v /= d);
        let (prow, pinv) = (a[col].clone(), inv[col].clone());
        for r in 0..k {
            if r == col {
                continue;
            }
            let f = a[r][col];
            if f != 0.0 {
                a[r].iter_mut().zip(&prow).for_each(|(x, p)| *x -= f * p);
                inv[r].iter_mut().zip(&pinv).for_each(|(x, p)| *x -= f * p);
            }
        }
    }
    Some(inv)
}

/// `m / dmax`, a lower bound on the LP optimum (sum the constraints and
/// divide by the largest column sum).
pub fn lp_lower_bound(inst: &HsInstance) -> Result<f64> {
    match inst.dmax() {
        0 => Err(HsError::Degenerate("dmax = 0")),
        d => Ok(inst.m() as f64 / d as f64),
    }
}

/// Default constant `C̃` of the uniform candidate `x̂ = min(1, 1/(C̃np))·1`.
pub const DEFAULT_C_TILDE: f64 = 0.5;

/// `‖x̂‖₁` for the uniform vector `x̂_j = min(1, 1/(C̃np))` when `x̂` is
/// feasible, else `None`. `p` falls back to the instance's generation
/// metadata.
pub fn uniform_upper_bound(inst: &HsInstance, p: Option<f64>, c_tilde: f64) -> Result<Option<f64>> {
    let p = p
        .or_else(|| inst.gen_meta().map(|g| g.p))
        .ok_or_else(|| HsError::InvalidArgument("p unknown: no gen_meta and none supplied".into()))?;
    if !(p > 0.0 && p <= 1.0) {
        return Err(HsError::InvalidProbability(p));
    }
    if !(c_tilde > 0.0 && c_tilde < 1.0) {
        return Err(HsError::InvalidArgument(format!(
            "C~ must lie in (0,1), got {c_tilde}"
        )));
    }
    let n = inst.n();
    let xhat = (1.0 / (c_tilde * n as f64 * p)).min(1.0);
    let min_row = inst.rows().iter().map(|r| r.count()).min().unwrap_or(0);
    if (min_row as f64) * xhat >= 1.0 - 1e-12 {
        Ok(Some(n as f64 * xhat))
    } else {
        Ok(None)
    }
}
