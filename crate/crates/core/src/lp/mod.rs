//! Linear programming: simplex solver, vertex-enumeration oracle and
//! recession-cone based boundedness certification.

mod boundedness;
pub mod dense;
mod simplex;
mod vertices;

use nalgebra::DVector;
use serde::Serialize;

pub use boundedness::{boundedness_report, find_descent_ray, BoundednessDiagnosis, Verdict};
pub use simplex::solve_lp_with;
pub use vertices::{enumerate_vertices, enumerate_vertices_with, MAX_ENUM_CONSTRAINTS, MAX_ENUM_VARS};

use crate::assembly::LpProblem;
use crate::error::LpError;

pub const DEFAULT_TOL_FEAS: f64 = 1e-8;
pub const DEFAULT_TOL_OPT: f64 = 1e-9;

/// Bounds at or beyond this magnitude are treated as infinite by the solver.
pub const INFINITE_BOUND: f64 = 1e30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Present iff `status == Optimal`.
    pub g_opt: Option<DVector<f64>>,
    /// `costᵀ g_opt`; `−∞` when unbounded, `+∞` when infeasible.
    pub objective: f64,
    /// Descent direction in the recession cone, present iff unbounded.
    pub ray: Option<DVector<f64>>,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub tol_feas: f64,
    pub tol_opt: f64,
    /// Hard pivot limit; `None` picks `50·(rows + cols) + 10_000`.
    pub max_iterations: Option<usize>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { tol_feas: DEFAULT_TOL_FEAS, tol_opt: DEFAULT_TOL_OPT, max_iterations: None }
    }
}

/// Solves `lp` with the two-phase bounded-variable primal simplex.
pub fn solve_lp(lp: &LpProblem, tol_feas: f64, tol_opt: f64) -> Result<LpSolution, LpError> {
    solve_lp_with(lp, &SolverOptions { tol_feas, tol_opt, max_iterations: None })
}

/// Largest violation of `A g ≤ b` and the box bounds; zero when feasible.
pub fn check_feasibility(lp: &LpProblem, g: &DVector<f64>) -> Result<f64, LpError> {
    if g.len() != lp.n_vars() {
        return Err(LpError::PointLength { expected: lp.n_vars(), found: g.len() });
    }
    let mut worst: f64 = 0.0;
    if lp.n_rows() > 0 {
        let r = &lp.a * g - &lp.b;
        worst = worst.max(r.max());
    }
    for j in 0..g.len() {
        worst = worst.max(lp.lower[j] - g[j]).max(g[j] - lp.upper[j]);
    }
    Ok(worst.max(0.0))
}
