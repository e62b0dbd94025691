//! Exhaustive basic-feasible-point enumeration, an oracle for small LPs.

use nalgebra::{DMatrix, DVector};

use super::dense::solve_square;
use super::{DEFAULT_TOL_FEAS, INFINITE_BOUND};
use crate::assembly::LpProblem;
use crate::error::LpError;

pub const MAX_ENUM_VARS: usize = 12;
pub const MAX_ENUM_CONSTRAINTS: usize = 40;
/// Upper limit on the number of `n`-subsets examined.
const MAX_SUBSETS: u128 = 50_000_000;
const DEDUP_TOL: f64 = 1e-9;

pub fn enumerate_vertices(lp: &LpProblem) -> Result<Vec<DVector<f64>>, LpError> {
    enumerate_vertices_with(lp, DEFAULT_TOL_FEAS)
}

/// All basic feasible points of `{A g ≤ b, lower ≤ g ≤ upper}`.
///
/// Every `n`-subset of the constraints (rows plus finite bounds) with a
/// nonsingular system is solved with equality and kept if it satisfies all
/// constraints within `tol_feas · (1 + |rhs|)`. Points closer than `1e-9` in
/// max-norm are merged. Output order follows the lexicographic subset order.
pub fn enumerate_vertices_with(lp: &LpProblem, tol_feas: f64) -> Result<Vec<DVector<f64>>, LpError> {
    let n = lp.n_vars();
    let mut rows: Vec<(DVector<f64>, f64)> = (0..lp.n_rows())
        .map(|i| (lp.a.row(i).transpose(), lp.b[i]))
        .collect();
    for j in 0..n {
        if lp.lower[j] > -INFINITE_BOUND {
            let mut e = DVector::zeros(n);
            e[j] = -1.0;
            rows.push((e, -lp.lower[j]));
        }
        if lp.upper[j] < INFINITE_BOUND {
            let mut e = DVector::zeros(n);
            e[j] = 1.0;
            rows.push((e, lp.upper[j]));
        }
    }
    let total = rows.len();
    if n > MAX_ENUM_VARS || total > MAX_ENUM_CONSTRAINTS || binomial(total, n) > MAX_SUBSETS {
        return Err(LpError::EnumerationGuard { variables: n, constraints: total });
    }

    let feasible = |g: &DVector<f64>| {
        rows.iter().all(|(a, b)| a.dot(g) <= b + tol_feas * (1.0 + b.abs()))
    };

    let mut out: Vec<DVector<f64>> = Vec::new();
    if n == 0 {
        let g = DVector::zeros(0);
        if feasible(&g) {
            out.push(g);
        }
        return Ok(out);
    }
    if total < n {
        return Ok(out);
    }

    let mut subset: Vec<usize> = (0..n).collect();
    loop {
        let m = DMatrix::from_fn(n, n, |r, c| rows[subset[r]].0[c]);
        let rhs = DVector::from_iterator(n, subset.iter().map(|&i| rows[i].1));
        if let Some(g) = solve_square(&m, &rhs, 1e-12) {
            if g.iter().all(|v| v.is_finite())
                && feasible(&g)
                && !out.iter().any(|v| (v - &g).amax() <= DEDUP_TOL)
            {
                out.push(g);
            }
        }
        if !next_subset(&mut subset, total) {
            break;
        }
    }
    Ok(out)
}

/// Advances to the next lexicographic `k`-subset of `0..total`.
fn next_subset(subset: &mut [usize], total: usize) -> bool {
    let k = subset.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if subset[i] < total - k + i {
            subset[i] += 1;
            for j in i + 1..k {
                subset[j] = subset[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::Bounds;

    fn lp(n: usize, a: &[&[f64]], b: &[f64], bounds: Option<Bounds>) -> LpProblem {
        let flat: Vec<f64> = a.iter().flat_map(|r| r.iter().copied()).collect();
        LpProblem::new(
            DVector::zeros(n),
            DMatrix::from_row_slice(a.len(), n, &flat),
            DVector::from_column_slice(b),
            bounds,
            None,
        )
        .unwrap()
    }

    #[test]
    fn unit_square_has_four_vertices() {
        let p = lp(2, &[], &[], Some(Bounds::uniform(2, 0.0, 1.0)));
        assert_eq!(enumerate_vertices(&p).unwrap().len(), 4);
    }

    #[test]
    fn path_instance_vertices() {
        let p = lp(1, &[&[-0.5], &[-0.5], &[0.5], &[0.5], &[0.5], &[0.5]], &[0.5, 0.5, 1.5, 1.5, 0.5, 0.5], None);
        let mut v: Vec<f64> = enumerate_vertices(&p).unwrap().iter().map(|g| g[0]).collect();
        v.sort_by(f64::total_cmp);
        assert_eq!(v.len(), 2);
        assert!((v[0] + 1.0).abs() < 1e-12 && (v[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn empty_polyhedron() {
        let p = lp(1, &[&[1.0], &[-1.0]], &[-1.0, -1.0], None);
        assert!(enumerate_vertices(&p).unwrap().is_empty());
    }

    #[test]
    fn guard_rejects_large_instances() {
        let p = lp(13, &[], &[], None);
        assert!(matches!(enumerate_vertices(&p), Err(LpError::EnumerationGuard { .. })));
        let rows: Vec<Vec<f64>> = (0..41).map(|_| vec![1.0]).collect();
        let refs: Vec<&[f64]> = rows.iter().map(Vec::as_slice).collect();
        let p = lp(1, &refs, &[1.0; 41], None);
        assert!(matches!(enumerate_vertices(&p), Err(LpError::EnumerationGuard { .. })));
    }

    #[test]
    fn subsets_are_enumerated_in_order() {
        let mut s = vec![0, 1];
        let mut seen = vec![s.clone()];
        while next_subset(&mut s, 4) {
            seen.push(s.clone());
        }
        assert_eq!(seen.len(), 6);
        assert_eq!(seen.last().unwrap(), &vec![2, 3]);
        assert_eq!(binomial(40, 12), 5_586_853_480);
    }
}
