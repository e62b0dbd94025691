//! Sufficient conditions for the control LP to have a finite optimum.
//!
//! Three checks, tried in order:
//! 1. every control has finite box bounds, so the feasible set is a polytope;
//! 2. two-sided flux caps and `Qg` of full column rank, which gives
//!    `‖g‖₂ ≤ √m ‖q_max − q0‖_∞ / σ_min(Qg)`;
//! 3. an auxiliary LP over the recession cone finds no descent ray.
//!
//! When (3) finds no descent ray but the feasible set contains a line (a
//! neutral direction such as an unfixed gauge), the verdict is
//! `Inconclusive` and the line is reported.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::dense::right_singular;
use super::{solve_lp_with, LpStatus, SolverOptions, DEFAULT_TOL_OPT, INFINITE_BOUND};
use crate::assembly::{Bounds, LpProblem, RowTag};

/// Relative singular-value threshold for rank decisions.
const RANK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Compact,
    Bounded,
    BoundedBelow,
    DescentRayFound,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundednessDiagnosis {
    pub case_i_box: bool,
    pub case_ii_rank: bool,
    pub sigma_min: f64,
    pub sigma_max: f64,
    /// `√m ‖q_max − q0‖_∞ / σ_min`, present when case (ii) holds.
    pub norm_bound: Option<f64>,
    /// `√m ‖q_max + |q0|‖_∞ / σ_min`, which also covers the lower cap side.
    pub norm_bound_two_sided: Option<f64>,
    pub case_iii_descent_ray: Option<Vec<f64>>,
    /// Direction `d` with `±d` both in the recession cone.
    pub neutral_ray: Option<Vec<f64>>,
    pub verdict: Verdict,
}

fn is_finite_bound(v: f64) -> bool {
    v.abs() < INFINITE_BOUND
}

/// Solves `min costᵀd  s.t.  A d ≤ 0, −1 ≤ d ≤ 1` plus the recession sign
/// conditions from the finite bounds, and returns `d` when the optimum is
/// below `−tol_opt`.
pub fn find_descent_ray(lp: &LpProblem) -> Option<DVector<f64>> {
    find_descent_ray_with(lp, DEFAULT_TOL_OPT)
}

pub fn find_descent_ray_with(lp: &LpProblem, tol_opt: f64) -> Option<DVector<f64>> {
    let n = lp.n_vars();
    let mut bounds = Bounds::uniform(n, -1.0, 1.0);
    for j in 0..n {
        let (lo, hi) = (is_finite_bound(lp.lower[j]), is_finite_bound(lp.upper[j]));
        if lo {
            bounds.lower[j] = 0.0;
        }
        if hi {
            bounds.upper[j] = 0.0;
        }
    }
    let aux = LpProblem::new(
        lp.cost.clone(),
        lp.a.clone(),
        DVector::zeros(lp.n_rows()),
        Some(bounds),
        Some(lp.row_tags.clone()),
    )
    .expect("auxiliary problem inherits a valid shape");
    let opts = SolverOptions { tol_opt, ..SolverOptions::default() };
    let sol = solve_lp_with(&aux, &opts).ok()?;
    match sol.status {
        LpStatus::Optimal if sol.objective < -tol_opt => sol.g_opt,
        _ => None,
    }
}

/// A direction `d` with `A d = 0` and `d_j = 0` wherever a bound is finite,
/// i.e. a line contained in every nonempty feasible set.
fn neutral_line(lp: &LpProblem) -> Option<DVector<f64>> {
    let n = lp.n_vars();
    if n == 0 {
        return None;
    }
    let bounded: Vec<usize> = (0..n)
        .filter(|&j| is_finite_bound(lp.lower[j]) || is_finite_bound(lp.upper[j]))
        .collect();
    let mut m = DMatrix::zeros(lp.n_rows() + bounded.len(), n);
    m.rows_mut(0, lp.n_rows()).copy_from(&lp.a);
    for (r, &j) in bounded.iter().enumerate() {
        m[(lp.n_rows() + r, j)] = 1.0;
    }
    let (sigma, vectors) = right_singular(&m);
    let s_max = sigma.last().copied().unwrap_or(0.0);
    if sigma[0] <= RANK_TOL * s_max || s_max == 0.0 {
        let mut d = vectors.column(0).clone_owned();
        let scale = d.amax();
        if scale > 0.0 {
            d /= scale;
        }
        Some(d)
    } else {
        None
    }
}

/// Runs the three boundedness checks on an assembled control LP.
pub fn boundedness_report(
    lp: &LpProblem,
    qg: &DMatrix<f64>,
    q0: &DVector<f64>,
    q_max: &DVector<f64>,
) -> BoundednessDiagnosis {
    let n = lp.n_vars();
    let case_i_box = (0..n).all(|j| is_finite_bound(lp.lower[j]) && is_finite_bound(lp.upper[j]));

    let (sigma, _) = right_singular(qg);
    let sigma_min = sigma.first().copied().unwrap_or(0.0);
    let sigma_max = sigma.last().copied().unwrap_or(0.0);
    let two_sided = lp.count_tag(RowTag::CapUpper) > 0
        && lp.count_tag(RowTag::CapLower) > 0
        && q_max.iter().all(|v| is_finite_bound(*v));
    let case_ii_rank = n > 0 && two_sided && sigma_min > RANK_TOL * sigma_max;

    let (norm_bound, norm_bound_two_sided) = if case_ii_rank {
        let root_m = (qg.nrows() as f64).sqrt();
        let upper_gap = (q_max - q0).amax();
        let widest = q_max.iter().zip(q0.iter()).map(|(m, q)| m + q.abs()).fold(0.0, f64::max);
        (Some(root_m * upper_gap / sigma_min), Some(root_m * widest / sigma_min))
    } else {
        (None, None)
    };

    let mut diag = BoundednessDiagnosis {
        case_i_box,
        case_ii_rank,
        sigma_min,
        sigma_max,
        norm_bound,
        norm_bound_two_sided,
        case_iii_descent_ray: None,
        neutral_ray: None,
        verdict: Verdict::Inconclusive,
    };
    if case_i_box {
        diag.verdict = Verdict::Compact;
        return diag;
    }
    if case_ii_rank {
        diag.verdict = Verdict::Bounded;
        return diag;
    }
    if let Some(d) = find_descent_ray(lp) {
        diag.case_iii_descent_ray = Some(d.iter().copied().collect());
        diag.verdict = Verdict::DescentRayFound;
        return diag;
    }
    match neutral_line(lp) {
        Some(d) => {
            diag.neutral_ray = Some(d.iter().copied().collect());
            diag.verdict = Verdict::Inconclusive;
        }
        None => diag.verdict = Verdict::BoundedBelow,
    }
    diag
}
