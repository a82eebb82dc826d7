//! Simplex machinery for local-hidden-variable feasibility.
//!
//! The systems solved here have one nonnegative weight per deterministic
//! strategy: observer i answers each of m settings with a fixed bit, so a
//! strategy is an n*m-bit integer and there are 2^(n*m) columns. Rows live
//! in "correlator coordinates": a row is a digit string t in {0..m}^n
//! (observer 0 most significant), digit 0 meaning the observer is absent,
//! digit k meaning setting k-1. The column entry of strategy s at row t is
//! the product over present observers of the strategy's sign (+1 for
//! outcome 0, -1 for outcome 1); the all-zero row is the normalization row
//! with entry 1. Columns are never materialized: pricing contracts the
//! dual vector tensor one observer at a time, visiting all strategies in
//! prefix-shared fashion.
//!
//! A dense tableau solver over exact rationals handles small systems in
//! their raw uncompressed form.

use ndarray::{Array1, Array2};
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::tol;

/// Entering tolerance: a column prices as improving only beyond this.
const PRICE_TOL: f64 = 1e-9;
/// Smallest pivot magnitude accepted by the ratio test.
const RATIO_EPS: f64 = 1e-11;
/// Consecutive degenerate pivots before switching to Bland's rule.
const STALL_SWITCH: u64 = 200;
/// Basic solution refresh period (recompute x = B^-1 b).
const REFRESH_PERIOD: u64 = 256;

/// Equality system A w = b over implicit deterministic-strategy columns.
#[derive(Debug, Clone)]
pub struct ImplicitLp {
    /// Observer count.
    pub n: usize,
    /// Settings per observer.
    pub m: usize,
    /// Flat (m+1)^n coordinates of the rows present, strictly ascending.
    pub rows: Vec<usize>,
    /// Right-hand side, one entry per row.
    pub b: Vec<f64>,
}

impl ImplicitLp {
    pub fn new(n: usize, m: usize, rows: Vec<usize>, b: Vec<f64>) -> Result<Self> {
        if n
            .checked_mul(m)
            .map(|bits| bits > 63)
            .unwrap_or(true)
        {
            return Err(Error::InvalidArgument(format!(
                "strategy space 2^({n}*{m}) overflows the index type"
            )));
        }
        let full = (m + 1).pow(n as u32);
        if rows.len() != b.len() || rows.is_empty() {
            return Err(Error::DimensionMismatch(format!(
                "{} rows against {} right-hand entries",
                rows.len(),
                b.len()
            )));
        }
        if rows.windows(2).any(|w| w[0] >= w[1]) || *rows.last().unwrap() >= full {
            return Err(Error::InvalidArgument(
                "row coordinates must be ascending and inside the tensor".into(),
            ));
        }
        Ok(ImplicitLp { n, m, rows, b })
    }

    pub fn strategy_count(&self) -> u64 {
        1u64 << (self.n * self.m)
    }

    /// Sign of strategy s for observer i on 0-based setting k.
    pub fn sign(s: u64, m: usize, observer: usize, setting: usize) -> f64 {
        if (s >> (observer * m + setting)) & 1 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    /// Column entry of strategy s at the flat row coordinate.
    pub fn column_entry(&self, s: u64, flat: usize) -> f64 {
        let mut rest = flat;
        let mut value = 1.0;
        for observer in (0..self.n).rev() {
            let digit = rest % (self.m + 1);
            rest /= self.m + 1;
            if digit > 0 {
                value *= Self::sign(s, self.m, observer, digit - 1);
            }
        }
        value
    }

    /// Dense (m+1)^n tensor holding `values` at this system's rows.
    fn spread(&self, values: &[f64]) -> Vec<f64> {
        let mut tensor = vec![0.0; (self.m + 1).pow(self.n as u32)];
        for (slot, &flat) in self.rows.iter().enumerate() {
            tensor[flat] = values[slot];
        }
        tensor
    }
}

/// max_s sum_t Y[t] * a_s[t] with the lowest strategy index on ties.
///
/// Contracts the last tensor axis per level, so the top level fixes the
/// last observer's answer table, which occupies the most significant bits
/// of the strategy index; first-found-strict-improvement then realizes the
/// lexicographically smallest argmax.
pub(crate) fn strategy_max(tensor: &[f64], m: usize) -> (f64, u64) {
    if tensor.len() == 1 {
        return (tensor[0], 0);
    }
    let width = m + 1;
    let sub = tensor.len() / width;
    let mut best = f64::NEG_INFINITY;
    let mut best_s = 0u64;
    let mut contracted = vec![0.0; sub];
    for table in 0..(1u64 << m) {
        for (j, slot) in contracted.iter_mut().enumerate() {
            let base = j * width;
            let mut acc = tensor[base];
            for k in 0..m {
                let v = if (table >> k) & 1 == 0 { 1.0 } else { -1.0 };
                acc += v * tensor[base + 1 + k];
            }
            *slot = acc;
        }
        let (value, rest) = strategy_max(&contracted, m);
        if value > best {
            best = value;
            best_s = (table << (m * log_len(sub, width))) | rest;
        }
    }
    (best, best_s)
}

/// Observers remaining in a tensor of this length.
fn log_len(mut len: usize, width: usize) -> usize {
    let mut d = 0;
    while len > 1 {
        len /= width;
        d += 1;
    }
    d
}

/// Lowest strategy index whose column prices above `threshold`, if any.
fn first_strategy_above(tensor: &[f64], m: usize, threshold: f64) -> Option<u64> {
    if tensor.len() == 1 {
        return if tensor[0] > threshold { Some(0) } else { None };
    }
    let width = m + 1;
    let sub = tensor.len() / width;
    let mut contracted = vec![0.0; sub];
    for table in 0..(1u64 << m) {
        for (j, slot) in contracted.iter_mut().enumerate() {
            let base = j * width;
            let mut acc = tensor[base];
            for k in 0..m {
                let v = if (table >> k) & 1 == 0 { 1.0 } else { -1.0 };
                acc += v * tensor[base + 1 + k];
            }
            *slot = acc;
        }
        let (peak, _) = strategy_max(&contracted, m);
        if peak > threshold {
            let (_, rest) =
                first_strategy_above(&contracted, m, threshold).map_or((0.0, 0), |s| (0.0, s));
            return Some((table << (m * log_len(sub, width))) | rest);
        }
    }
    None
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum BasisVar {
    Artificial(usize),
    Strategy(u64),
}

impl BasisVar {
    /// Total order used by Bland's rule: strategies first by index, then
    /// artificials by row position.
    fn ordinal(&self, strategies: u64) -> u64 {
        match self {
            BasisVar::Strategy(s) => *s,
            BasisVar::Artificial(r) => strategies + *r as u64,
        }
    }
}

/// Verdict of the phase-1 run.
#[derive(Debug, Clone)]
pub enum PhaseOneVerdict {
    /// Artificials were driven to (numerical) zero; the listed strategy
    /// weights satisfy the system.
    Feasible { weights: Vec<(u64, f64)> },
    /// The optimum stayed positive; `dual` is a separating functional in
    /// row order with dual[r] * a_s[r] summing <= 0 for every strategy
    /// while dual . b equals the positive objective.
    Infeasible { objective: f64, dual: Vec<f64> },
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SolveStats {
    pub iterations: u64,
    pub degenerate: u64,
    pub bland: bool,
}

struct Tableau<'a> {
    lp: &'a ImplicitLp,
    /// Row sign flips making the working right-hand side nonnegative.
    sigma: Vec<f64>,
    b: Vec<f64>,
    binv: Array2<f64>,
    basis: Vec<BasisVar>,
    x: Vec<f64>,
    stats: SolveStats,
    stall: u64,
}

impl<'a> Tableau<'a> {
    fn new(lp: &'a ImplicitLp) -> Self {
        let r = lp.rows.len();
        let sigma: Vec<f64> = lp.b.iter().map(|&v| if v < 0.0 { -1.0 } else { 1.0 }).collect();
        let b: Vec<f64> = lp.b.iter().zip(&sigma).map(|(&v, &s)| v * s).collect();
        Tableau {
            lp,
            sigma,
            binv: Array2::eye(r),
            basis: (0..r).map(BasisVar::Artificial).collect(),
            x: b.clone(),
            b,
            stats: SolveStats::default(),
            stall: 0,
        }
    }

    fn rows(&self) -> usize {
        self.lp.rows.len()
    }

    /// Signed column of the working system for a strategy.
    fn column(&self, s: u64) -> Vec<f64> {
        self.lp
            .rows
            .iter()
            .zip(&self.sigma)
            .map(|(&flat, &sg)| sg * self.lp.column_entry(s, flat))
            .collect()
    }

    /// Dual y = c_B B^-1 for the given basic costs.
    fn dual(&self, cost: impl Fn(&BasisVar) -> f64) -> Vec<f64> {
        let c = Array1::from_iter(self.basis.iter().map(cost));
        self.binv.t().dot(&c).to_vec()
    }

    /// Working-system price tensor for pricing strategies against y.
    fn price_tensor(&self, y: &[f64]) -> Vec<f64> {
        let signed: Vec<f64> = y.iter().zip(&self.sigma).map(|(&v, &s)| v * s).collect();
        self.lp.spread(&signed)
    }

    /// One pivot: bring `entering` in, returns false when the ratio test
    /// finds no positive direction (cannot happen for phase-1 systems with
    /// bounded feasible sets, treated as a stall).
    fn pivot(&mut self, entering: BasisVar, column: &[f64]) -> Result<()> {
        let r = self.rows();
        let col = Array1::from(column.to_vec());
        let d = self.binv.dot(&col).to_vec();
        let mut leave: Option<usize> = None;
        let mut best_ratio = f64::INFINITY;
        for i in 0..r {
            if d[i] > RATIO_EPS {
                let ratio = self.x[i] / d[i];
                let better = match leave {
                    None => true,
                    Some(cur) => {
                        if (ratio - best_ratio).abs() <= 1e-12 * (1.0 + best_ratio.abs()) {
                            self.tie_prefers(i, cur)
                        } else {
                            ratio < best_ratio
                        }
                    }
                };
                if better {
                    leave = Some(i);
                    best_ratio = ratio.min(best_ratio);
                }
            }
        }
        let leave = leave.ok_or(Error::SolverStall(self.stats.iterations))?;
        let step = self.x[leave] / d[leave];
        if step <= 1e-13 {
            self.stall += 1;
            self.stats.degenerate += 1;
        } else {
            self.stall = 0;
        }
        let pivot = d[leave];
        self.binv.row_mut(leave).mapv_inplace(|v| v / pivot);
        let prow = self.binv.row(leave).to_owned();
        for i in 0..r {
            if i != leave && d[i] != 0.0 {
                self.binv.row_mut(i).scaled_add(-d[i], &prow);
            }
        }
        for i in 0..r {
            if i != leave {
                self.x[i] -= d[i] * step;
                if self.x[i] < 0.0 {
                    self.x[i] = 0.0;
                }
            }
        }
        self.x[leave] = step;
        self.basis[leave] = entering;
        self.stats.iterations += 1;
        if self.stats.iterations % REFRESH_PERIOD == 0 {
            self.refresh();
        }
        if self.stall >= STALL_SWITCH {
            self.stats.bland = true;
        }
        Ok(())
    }

    /// Ratio-test tie preference: under Bland, lowest variable ordinal;
    /// otherwise artificials first, then lowest row.
    fn tie_prefers(&self, cand: usize, cur: usize) -> bool {
        if self.stats.bland {
            self.basis[cand].ordinal(self.lp.strategy_count())
                < self.basis[cur].ordinal(self.lp.strategy_count())
        } else {
            match (&self.basis[cand], &self.basis[cur]) {
                (BasisVar::Artificial(_), BasisVar::Strategy(_)) => true,
                (BasisVar::Strategy(_), BasisVar::Artificial(_)) => false,
                _ => cand < cur,
            }
        }
    }

    fn refresh(&mut self) {
        let bvec = Array1::from(self.b.clone());
        self.x = self.binv.dot(&bvec).mapv(|v| v.max(0.0)).to_vec();
    }

    fn objective(&self, cost: impl Fn(&BasisVar) -> f64) -> f64 {
        self.basis
            .iter()
            .zip(&self.x)
            .map(|(var, &xi)| cost(var) * xi)
            .sum()
    }

    /// Runs the simplex loop for the given basic-cost function until no
    /// strategy column prices above `enter_above`. Artificial columns
    /// never enter. Returns the final dual in working coordinates.
    fn optimize(
        &mut self,
        cost: impl Fn(&BasisVar) -> f64 + Copy,
        enter_above: f64,
        iter_cap: u64,
    ) -> Result<Vec<f64>> {
        loop {
            if self.stats.iterations > iter_cap {
                return Err(Error::SolverStall(self.stats.iterations));
            }
            let y = self.dual(cost);
            let tensor = self.price_tensor(&y);
            let entering = if self.stats.bland {
                first_strategy_above(&tensor, self.lp.m, enter_above + PRICE_TOL)
            } else {
                let (value, s) = strategy_max(&tensor, self.lp.m);
                if value > enter_above + PRICE_TOL {
                    Some(s)
                } else {
                    None
                }
            };
            let Some(s) = entering else {
                return Ok(y);
            };
            let column = self.column(s);
            self.pivot(BasisVar::Strategy(s), &column)?;
        }
    }

    fn strategy_weights(&self) -> Vec<(u64, f64)> {
        let mut weights: Vec<(u64, f64)> = self
            .basis
            .iter()
            .zip(&self.x)
            .filter_map(|(var, &xi)| match var {
                BasisVar::Strategy(s) if xi > 0.0 => Some((*s, xi)),
                _ => None,
            })
            .collect();
        weights.sort_by_key(|&(s, _)| s);
        weights
    }
}

fn iteration_cap(rows: usize) -> u64 {
    200 * rows as u64 + 20_000
}

/// Phase-1 feasibility: minimize the artificial mass of A w = b, w >= 0.
///
/// Feasible when the optimum falls at or below the feasibility tolerance;
/// otherwise the phase-1 dual is returned as a separating functional
/// (already mapped back to unflipped row signs).
pub fn phase_one(lp: &ImplicitLp) -> Result<(PhaseOneVerdict, SolveStats)> {
    let mut t = Tableau::new(lp);
    let cost = |v: &BasisVar| match v {
        BasisVar::Artificial(_) => 1.0,
        BasisVar::Strategy(_) => 0.0,
    };
    let y = t.optimize(cost, 0.0, iteration_cap(lp.rows.len()))?;
    let objective = t.objective(cost);
    if objective <= tol::LP_FEASIBILITY {
        Ok((
            PhaseOneVerdict::Feasible {
                weights: t.strategy_weights(),
            },
            t.stats,
        ))
    } else {
        let dual: Vec<f64> = y.iter().zip(&t.sigma).map(|(&v, &s)| v * s).collect();
        Ok((PhaseOneVerdict::Infeasible { objective, dual }, t.stats))
    }
}

/// Minimum total weight lambda >= 0 with sum_s lambda_s a_s = b, plus the
/// optimal dual y (max y.b subject to y.a_s <= 1 by LP duality).
///
/// Errors with `UnverifiedVerdict` when b is not in the strategy cone.
pub fn minimal_weight_dual(lp: &ImplicitLp) -> Result<(f64, Vec<f64>)> {
    let mut t = Tableau::new(lp);
    let phase1 = |v: &BasisVar| match v {
        BasisVar::Artificial(_) => 1.0,
        BasisVar::Strategy(_) => 0.0,
    };
    let cap = iteration_cap(lp.rows.len());
    t.optimize(phase1, 0.0, cap)?;
    if t.objective(phase1) > tol::LP_FEASIBILITY {
        return Err(Error::UnverifiedVerdict(
            "target vector lies outside the strategy cone".into(),
        ));
    }
    let phase2 = |v: &BasisVar| match v {
        BasisVar::Artificial(_) => 0.0,
        BasisVar::Strategy(_) => 1.0,
    };
    let y = t.optimize(phase2, 1.0, 2 * cap)?;
    let optimum = t.objective(phase2);
    let dual: Vec<f64> = y.iter().zip(&t.sigma).map(|(&v, &s)| v * s).collect();
    Ok((optimum, dual))
}

/// Exact phase-1 feasibility of a dense system A w = b, w >= 0, in
/// rational arithmetic with Bland's rule throughout. Returns true when
/// the artificial optimum is exactly zero.
pub fn exact_feasible(a: &Array2<f64>, b: &[f64]) -> Result<bool> {
    let rows = a.nrows();
    let cols = a.ncols();
    if b.len() != rows {
        return Err(Error::DimensionMismatch(format!(
            "{rows} rows against {} right-hand entries",
            b.len()
        )));
    }
    let rat = |v: f64| -> Result<BigRational> {
        BigRational::from_float(v).ok_or_else(|| {
            Error::InvalidArgument(format!("non-finite value {v} in exact system"))
        })
    };
    // Working tableau rows: [A | b], rows flipped so b >= 0.
    let mut tab: Vec<Vec<BigRational>> = Vec::with_capacity(rows);
    for i in 0..rows {
        let flip = b[i] < 0.0;
        let mut row: Vec<BigRational> = Vec::with_capacity(cols + 1);
        for j in 0..cols {
            let v = rat(a[[i, j]])?;
            row.push(if flip { -v } else { v });
        }
        let v = rat(b[i])?;
        row.push(if flip { -v } else { v });
        tab.push(row);
    }
    // Reduced costs for strategy columns under the all-artificial basis:
    // cbar_j = -sum_i a_ij; objective starts at sum_i b_i.
    let mut cbar: Vec<BigRational> = (0..cols)
        .map(|j| -(0..rows).map(|i| tab[i][j].clone()).sum::<BigRational>())
        .collect();
    let mut objective: BigRational = (0..rows).map(|i| tab[i][cols].clone()).sum();
    // basis[i] = Some(column) for strategy columns, None for artificial i.
    let mut basis: Vec<Option<usize>> = vec![None; rows];
    let cap = 64 * (rows as u64 + cols as u64) + 10_000;
    let mut iterations = 0u64;
    loop {
        let entering = (0..cols).find(|&j| cbar[j].is_negative());
        let Some(j) = entering else {
            return Ok(objective.is_zero());
        };
        iterations += 1;
        if iterations > cap {
            return Err(Error::SolverStall(iterations));
        }
        let mut leave: Option<usize> = None;
        for i in 0..rows {
            if tab[i][j].is_positive() {
                let better = match leave {
                    None => true,
                    Some(cur) => {
                        let cand = &tab[i][cols] / &tab[i][j];
                        let best = &tab[cur][cols] / &tab[cur][j];
                        match cand.cmp(&best) {
                            std::cmp::Ordering::Less => true,
                            std::cmp::Ordering::Greater => false,
                            std::cmp::Ordering::Equal => {
                                bland_ordinal(basis[i], i, cols)
                                    < bland_ordinal(basis[cur], cur, cols)
                            }
                        }
                    }
                };
                if better {
                    leave = Some(i);
                }
            }
        }
        let Some(r) = leave else {
            // Unbounded descent cannot happen: the objective is a sum of
            // nonnegative artificials. Treat as numerical impossibility.
            return Err(Error::SolverStall(iterations));
        };
        let pivot = tab[r][j].clone();
        for v in tab[r].iter_mut() {
            *v /= &pivot;
        }
        for i in 0..rows {
            if i != r && !tab[i][j].is_zero() {
                let f = tab[i][j].clone();
                let (pivot_row, target) = if i < r {
                    let (lo, hi) = tab.split_at_mut(r);
                    (&hi[0], &mut lo[i])
                } else {
                    let (lo, hi) = tab.split_at_mut(i);
                    (&lo[r], &mut hi[0])
                };
                for (tv, pv) in target.iter_mut().zip(pivot_row.iter()) {
                    *tv -= &f * pv;
                }
            }
        }
        if !cbar[j].is_zero() {
            let f = cbar[j].clone();
            for (cj, pv) in cbar.iter_mut().zip(tab[r].iter()) {
                *cj -= &f * pv;
            }
            // The objective moves by cbar_j * theta with theta = the
            // normalized pivot row's right-hand entry.
            objective += &f * &tab[r][cols];
        }
        // Leaving an artificial keeps the objective consistent because its
        // cost contribution is captured by the objective update above.
        basis[r] = Some(j);
    }
}

fn bland_ordinal(var: Option<usize>, row: usize, cols: usize) -> usize {
    match var {
        Some(j) => j,
        None => cols + row,
    }
}
