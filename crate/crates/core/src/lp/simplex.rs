//! Two-phase primal simplex on the bounded-variable form
//!
//! ```text
//! A g + s = b,   lower ≤ g ≤ upper,   s ≥ 0
//! ```
//!
//! The tableau is kept in condensed form: one column per nonbasic variable
//! (always `n` of them), one row per basic variable. For the control LPs
//! here `n` is small and `m` large, so every pivot costs `O(m·n)`.
//!
//! Phase 1 minimizes the sum of bound violations of the basic variables.
//! Pricing is Dantzig's rule with a Harris two-pass ratio test, switching to
//! Bland's rule after `5·(m + n)` pivots. The dictionary and the basic values
//! are periodically rebuilt from the `n × n` system of active constraints,
//! which also polishes the final vertex.

use nalgebra::{DMatrix, DVector};

use super::dense::LuFactor;
use super::{LpSolution, LpStatus, SolverOptions, INFINITE_BOUND};
use crate::assembly::LpProblem;
use crate::error::LpError;

const PIVOT_TOL: f64 = 1e-9;
const REINVERT_EVERY: usize = 64;

pub fn solve_lp_with(lp: &LpProblem, opts: &SolverOptions) -> Result<LpSolution, LpError> {
    Tableau::new(lp, opts).run()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Phase {
    One,
    Two,
}

enum Step {
    Flip { t: f64 },
    Pivot { row: usize, t: f64, bound: f64 },
}

struct Tableau<'a> {
    lp: &'a LpProblem,
    m: usize,
    n: usize,
    lower: Vec<f64>,
    upper: Vec<f64>,
    value: Vec<f64>,
    basis: Vec<usize>,
    nonbasic: Vec<usize>,
    /// Row-major `m × n`: `Δ basis[i] = Σ_k d[i,k] · Δ nonbasic[k]`.
    d: Vec<f64>,
    tol_feas: f64,
    tol_opt: f64,
    iterations: usize,
    bland_after: usize,
    max_iterations: usize,
}

fn to_solver_bound(v: f64) -> f64 {
    if v <= -INFINITE_BOUND {
        f64::NEG_INFINITY
    } else if v >= INFINITE_BOUND {
        f64::INFINITY
    } else {
        v
    }
}

impl<'a> Tableau<'a> {
    fn new(lp: &'a LpProblem, opts: &SolverOptions) -> Self {
        let (m, n) = (lp.n_rows(), lp.n_vars());
        let mut lower: Vec<f64> = lp.lower.iter().map(|&v| to_solver_bound(v)).collect();
        let mut upper: Vec<f64> = lp.upper.iter().map(|&v| to_solver_bound(v)).collect();
        lower.extend(std::iter::repeat_n(0.0, m));
        upper.extend(std::iter::repeat_n(f64::INFINITY, m));

        let mut value = vec![0.0; n + m];
        for j in 0..n {
            value[j] = if lower[j].is_finite() {
                lower[j]
            } else if upper[j].is_finite() {
                upper[j]
            } else {
                0.0
            };
        }
        let g = DVector::from_column_slice(&value[..n]);
        let slack = &lp.b - &lp.a * g;
        value[n..].copy_from_slice(slack.as_slice());

        let mut d = vec![0.0; m * n];
        for i in 0..m {
            for k in 0..n {
                d[i * n + k] = -lp.a[(i, k)];
            }
        }
        Self {
            lp,
            m,
            n,
            lower,
            upper,
            value,
            basis: (n..n + m).collect(),
            nonbasic: (0..n).collect(),
            d,
            tol_feas: opts.tol_feas,
            tol_opt: opts.tol_opt,
            iterations: 0,
            bland_after: 5 * (m + n),
            max_iterations: opts.max_iterations.unwrap_or(50 * (m + n) + 10_000),
        }
    }

    fn tol(&self, bound: f64) -> f64 {
        self.tol_feas * (1.0 + bound.abs())
    }

    /// −1 below the lower bound, +1 above the upper bound, 0 otherwise.
    fn violation_sign(&self, v: usize) -> f64 {
        let x = self.value[v];
        if x < self.lower[v] - self.tol(self.lower[v]) {
            -1.0
        } else if x > self.upper[v] + self.tol(self.upper[v]) {
            1.0
        } else {
            0.0
        }
    }

    fn basic_costs(&self, phase: Phase) -> Vec<f64> {
        self.basis
            .iter()
            .map(|&v| match phase {
                Phase::One => self.violation_sign(v),
                Phase::Two => self.cost_of(v),
            })
            .collect()
    }

    fn cost_of(&self, v: usize) -> f64 {
        if v < self.n {
            self.lp.cost[v]
        } else {
            0.0
        }
    }

    fn reduced_costs(&self, phase: Phase) -> Vec<f64> {
        let cb = self.basic_costs(phase);
        let mut r: Vec<f64> = match phase {
            Phase::One => vec![0.0; self.n],
            Phase::Two => self.nonbasic.iter().map(|&v| self.cost_of(v)).collect(),
        };
        for (i, &c) in cb.iter().enumerate() {
            if c != 0.0 {
                let row = &self.d[i * self.n..(i + 1) * self.n];
                for (rk, dk) in r.iter_mut().zip(row) {
                    *rk += c * dk;
                }
            }
        }
        r
    }

    /// Improving nonbasic columns with their direction, best first.
    fn entering_candidates(&self, r: &[f64], bland: bool) -> Vec<(usize, f64)> {
        let mut cands: Vec<(usize, f64, f64)> = Vec::new();
        for (k, &rk) in r.iter().enumerate() {
            let v = self.nonbasic[k];
            let (lo, hi) = (self.lower[v], self.upper[v]);
            if lo == hi {
                continue;
            }
            let x = self.value[v];
            if rk < -self.tol_opt && x < hi {
                cands.push((k, 1.0, -rk));
            } else if rk > self.tol_opt && x > lo {
                cands.push((k, -1.0, rk));
            }
        }
        if bland {
            cands.sort_by_key(|c| self.nonbasic[c.0]);
        } else {
            cands.sort_by(|a, b| b.2.total_cmp(&a.2).then(a.0.cmp(&b.0)));
        }
        cands.into_iter().map(|(k, dir, _)| (k, dir)).collect()
    }

    fn ratio_test(&self, k: usize, dir: f64, phase: Phase, bland: bool) -> Option<Step> {
        let n = self.n;
        let v_in = self.nonbasic[k];
        let span = self.upper[v_in] - self.lower[v_in];

        // (row, exact step, relaxed step, |rate|, bound reached)
        let mut blockers: Vec<(usize, f64, f64, f64, f64)> = Vec::new();
        for i in 0..self.m {
            let rate = self.d[i * n + k] * dir;
            if rate.abs() <= PIVOT_TOL {
                continue;
            }
            let v = self.basis[i];
            let (x, lo, hi) = (self.value[v], self.lower[v], self.upper[v]);
            let below = x < lo - self.tol(lo);
            let above = x > hi + self.tol(hi);
            let bound = if rate < 0.0 {
                if phase == Phase::One && above {
                    hi
                } else if below {
                    continue;
                } else {
                    lo
                }
            } else if phase == Phase::One && below {
                lo
            } else if above {
                continue;
            } else {
                hi
            };
            if !bound.is_finite() {
                continue;
            }
            let exact = ((bound - x) / rate).max(0.0);
            let slack = self.tol(bound) * rate.signum();
            let relaxed = ((bound + slack - x) / rate).max(0.0);
            blockers.push((i, exact, relaxed, rate.abs(), bound));
        }

        if bland {
            let best = blockers.iter().min_by(|a, b| {
                a.1.total_cmp(&b.1).then(self.basis[a.0].cmp(&self.basis[b.0]))
            });
            return match best {
                Some(b) if !(span <= b.1) => Some(Step::Pivot { row: b.0, t: b.1, bound: b.4 }),
                _ if span.is_finite() => Some(Step::Flip { t: span }),
                _ => None,
            };
        }

        let t_max = blockers.iter().map(|b| b.2).fold(f64::INFINITY, f64::min);
        if span.is_finite() && span <= t_max {
            return Some(Step::Flip { t: span });
        }
        blockers
            .iter()
            .filter(|b| b.1 <= t_max)
            .max_by(|a, b| a.3.total_cmp(&b.3).then(b.0.cmp(&a.0)))
            .map(|b| Step::Pivot { row: b.0, t: b.1, bound: b.4 })
    }

    fn apply(&mut self, k: usize, dir: f64, step: Step) {
        let n = self.n;
        let v_in = self.nonbasic[k];
        let t = match step {
            Step::Flip { t } | Step::Pivot { t, .. } => t,
        };
        if t > 0.0 {
            for i in 0..self.m {
                let v = self.basis[i];
                self.value[v] += self.d[i * n + k] * dir * t;
            }
        }
        match step {
            Step::Flip { .. } => {
                self.value[v_in] = if dir > 0.0 { self.upper[v_in] } else { self.lower[v_in] };
            }
            Step::Pivot { row, bound, .. } => {
                self.value[v_in] += dir * t;
                let v_out = self.basis[row];
                self.value[v_out] = bound;
                self.pivot(row, k);
                self.basis[row] = v_in;
                self.nonbasic[k] = v_out;
            }
        }
    }

    fn pivot(&mut self, r: usize, k: usize) {
        let n = self.n;
        let p = self.d[r * n + k];
        for c in 0..n {
            self.d[r * n + c] = if c == k { 1.0 / p } else { -self.d[r * n + c] / p };
        }
        let pivot_row: Vec<f64> = self.d[r * n..(r + 1) * n].to_vec();
        for i in 0..self.m {
            if i == r {
                continue;
            }
            let f = self.d[i * n + k];
            if f == 0.0 {
                continue;
            }
            let row = &mut self.d[i * n..(i + 1) * n];
            for c in 0..n {
                row[c] = if c == k { f * pivot_row[c] } else { row[c] + f * pivot_row[c] };
            }
        }
    }

    /// Rebuilds the dictionary and the basic values from the active system.
    ///
    /// Nonbasic structurals pin `g_j`; nonbasic slacks pin `A_i g = b_i − s_i`.
    fn reinvert(&mut self) -> bool {
        let (n, m) = (self.n, self.m);
        if n == 0 {
            for i in 0..m {
                self.value[n + i] = self.lp.b[i];
            }
            return true;
        }
        let mut active = DMatrix::zeros(n, n);
        let mut rhs = DVector::zeros(n);
        for (k, &v) in self.nonbasic.iter().enumerate() {
            if v < n {
                active[(k, v)] = 1.0;
                rhs[k] = self.value[v];
            } else {
                let i = v - n;
                active.row_mut(k).copy_from(&self.lp.a.row(i));
                rhs[k] = self.lp.b[i] - self.value[v];
            }
        }
        let Some(lu) = LuFactor::new(&active, 1e-14) else {
            return false;
        };
        let g = lu.solve(&rhs);
        // ∂g/∂x_N: unit for structurals, −1 for slacks
        let mut dg = DMatrix::zeros(n, n);
        for (k, &v) in self.nonbasic.iter().enumerate() {
            let mut e = DVector::zeros(n);
            e[k] = if v < n { 1.0 } else { -1.0 };
            dg.set_column(k, &lu.solve(&e));
        }
        for j in 0..n {
            self.value[j] = g[j];
        }
        for (k, &v) in self.nonbasic.iter().enumerate() {
            // keep nonbasic values exactly where they were pinned
            if v < n {
                self.value[v] = rhs[k];
            }
        }
        let slack_rates = &self.lp.a * &dg;
        let slack_values = &self.lp.b - &self.lp.a * &g;
        for i in 0..m {
            let v = self.basis[i];
            let row = &mut self.d[i * n..(i + 1) * n];
            if v < n {
                for c in 0..n {
                    row[c] = dg[(v, c)];
                }
            } else {
                let s = v - n;
                for c in 0..n {
                    row[c] = -slack_rates[(s, c)];
                }
                self.value[v] = slack_values[s];
            }
        }
        true
    }

    fn ray(&self, k: usize, dir: f64) -> DVector<f64> {
        let n = self.n;
        let mut d = DVector::zeros(n);
        let v_in = self.nonbasic[k];
        if v_in < n {
            d[v_in] = dir;
        }
        for i in 0..self.m {
            let v = self.basis[i];
            let rate = self.d[i * n + k];
            if v < n && rate.abs() > PIVOT_TOL {
                d[v] = rate * dir;
            }
        }
        let scale = d.amax();
        if scale > 0.0 {
            d /= scale;
        }
        d
    }

    fn run(mut self) -> Result<LpSolution, LpError> {
        let mut phase = if self.basis.iter().any(|&v| self.violation_sign(v) != 0.0) {
            Phase::One
        } else {
            Phase::Two
        };
        let mut fresh = false;
        loop {
            if self.iterations > self.max_iterations {
                return Err(LpError::IterationLimit { iterations: self.iterations });
            }
            if self.iterations > 0 && self.iterations.is_multiple_of(REINVERT_EVERY) && !fresh {
                fresh = self.reinvert();
            }
            if phase == Phase::One && self.basis.iter().all(|&v| self.violation_sign(v) == 0.0) {
                phase = Phase::Two;
            }
            let bland = self.iterations >= self.bland_after;
            let r = self.reduced_costs(phase);
            let mut chosen = None;
            let mut saw_unbounded = None;
            for (k, dir) in self.entering_candidates(&r, bland) {
                match self.ratio_test(k, dir, phase, bland) {
                    Some(step) => {
                        chosen = Some((k, dir, step));
                        break;
                    }
                    None if phase == Phase::Two => {
                        saw_unbounded = Some((k, dir));
                        break;
                    }
                    None => continue,
                }
            }

            if let Some((k, dir)) = saw_unbounded {
                if !fresh {
                    fresh = self.reinvert();
                    if fresh {
                        continue;
                    }
                }
                let ray = self.ray(k, dir);
                return Ok(LpSolution {
                    status: LpStatus::Unbounded,
                    g_opt: None,
                    objective: f64::NEG_INFINITY,
                    ray: Some(ray),
                    iterations: self.iterations,
                });
            }

            match chosen {
                Some((k, dir, step)) => {
                    self.apply(k, dir, step);
                    self.iterations += 1;
                    fresh = false;
                }
                None => {
                    if !fresh {
                        fresh = self.reinvert();
                        if fresh {
                            continue;
                        }
                    }
                    if phase == Phase::One {
                        return Ok(LpSolution {
                            status: LpStatus::Infeasible,
                            g_opt: None,
                            objective: f64::INFINITY,
                            ray: None,
                            iterations: self.iterations,
                        });
                    }
                    let g = DVector::from_column_slice(&self.value[..self.n]);
                    return Ok(LpSolution {
                        status: LpStatus::Optimal,
                        objective: self.lp.objective(&g),
                        g_opt: Some(g),
                        ray: None,
                        iterations: self.iterations,
                    });
                }
            }
        }
    }
}
