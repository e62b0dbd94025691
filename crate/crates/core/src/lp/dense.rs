use nalgebra::{DMatrix, DVector};

/// LU factorization with partial pivoting, `P m = L U`.
#[derive(Debug, Clone)]
pub struct LuFactor {
    lu: DMatrix<f64>,
    perm: Vec<usize>,
}

impl LuFactor {
    /// Returns `None` when a pivot falls below `rel_tol` times the largest
    /// entry of `m`.
    pub fn new(m: &DMatrix<f64>, rel_tol: f64) -> Option<Self> {
        let n = m.nrows();
        debug_assert_eq!(n, m.ncols());
        let scale = m.amax().max(f64::MIN_POSITIVE);
        let mut a = m.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for col in 0..n {
            let (piv, piv_abs) = (col..n)
                .map(|r| (r, a[(r, col)].abs()))
                .fold((col, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if !(piv_abs > rel_tol * scale) {
                return None;
            }
            if piv != col {
                a.swap_rows(piv, col);
                perm.swap(piv, col);
            }
            let p = a[(col, col)];
            for r in col + 1..n {
                let f = a[(r, col)] / p;
                a[(r, col)] = f;
                if f != 0.0 {
                    for c in col + 1..n {
                        a[(r, c)] -= f * a[(col, c)];
                    }
                }
            }
        }
        Some(Self { lu: a, perm })
    }

    pub fn solve(&self, rhs: &DVector<f64>) -> DVector<f64> {
        let n = self.perm.len();
        let mut x = DVector::from_iterator(n, self.perm.iter().map(|&i| rhs[i]));
        for r in 0..n {
            let mut s = x[r];
            for c in 0..r {
                s -= self.lu[(r, c)] * x[c];
            }
            x[r] = s;
        }
        for r in (0..n).rev() {
            let mut s = x[r];
            for c in r + 1..n {
                s -= self.lu[(r, c)] * x[c];
            }
            x[r] = s / self.lu[(r, r)];
        }
        x
    }
}

/// Solves a square system, `None` if numerically singular (see [`LuFactor::new`]).
pub fn solve_square(m: &DMatrix<f64>, rhs: &DVector<f64>, rel_tol: f64) -> Option<DVector<f64>> {
    LuFactor::new(m, rel_tol).map(|lu| lu.solve(rhs))
}

/// Singular values of `m`, ascending, padded with zeros up to `m.ncols()`.
pub fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    let (values, _) = right_singular(m);
    values
}

/// Ascending singular values of `m` (zero-padded to `m.ncols()`) and the
/// matching right singular vectors as columns.
pub fn right_singular(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = m.ncols();
    if n == 0 {
        return (Vec::new(), DMatrix::zeros(0, 0));
    }
    // pad short matrices so V spans the whole column space
    let square = if m.nrows() < n {
        let mut p = DMatrix::zeros(n, n);
        p.rows_mut(0, m.nrows()).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = square.svd(false, true);
    let v_t = svd.v_t.expect("requested right singular vectors");
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| svd.singular_values[a].total_cmp(&svd.singular_values[b]));
    let values = order.iter().map(|&i| svd.singular_values[i]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| v_t[(order[c], r)]);
    (values, vectors)
}
