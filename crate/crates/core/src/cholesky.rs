//! Envelope (skyline) Cholesky factorization for sparse SPD systems.
//!
//! Rows are reordered with reverse Cuthill–McKee before factoring, which keeps
//! the profile narrow for the mesh-like graphs this crate works with. Fill-in
//! stays inside the envelope, so the factor reuses the envelope layout.
#![allow(clippy::needless_range_loop)]

use std::collections::VecDeque;

use nalgebra::DVector;

use crate::sparse::SparseMatrix;

/// Pivots at or below this multiple of the original diagonal entry are
/// treated as non-positive.
const PIVOT_RELATIVE_TOL: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NotPositiveDefinite {
    /// Row of the original (unpermuted) matrix where factorization broke down.
    pub row: usize,
    pub pivot: f64,
}

#[derive(Debug, Clone)]
pub struct SkylineCholesky {
    n: usize,
    /// `perm[k]` is the original index placed at position `k`.
    perm: Vec<usize>,
    /// First column of the envelope for each permuted row.
    first: Vec<usize>,
    /// Start of each row inside `values`; row `i` holds columns `first[i]..=i`.
    start: Vec<usize>,
    values: Vec<f64>,
}

impl SkylineCholesky {
    /// Factors a symmetric matrix. Only the lower triangle is read.
    pub fn factor(a: &SparseMatrix) -> Result<Self, NotPositiveDefinite> {
        assert_eq!(a.rows(), a.cols(), "Cholesky needs a square matrix");
        let n = a.rows();
        let perm = reverse_cuthill_mckee(a);
        let mut inv = vec![0; n];
        for (k, &i) in perm.iter().enumerate() {
            inv[i] = k;
        }

        let mut first: Vec<usize> = (0..n).collect();
        for &(r, c, _) in a.entries() {
            let (pr, pc) = (inv[r], inv[c]);
            let (hi, lo) = if pr >= pc { (pr, pc) } else { (pc, pr) };
            first[hi] = first[hi].min(lo);
        }
        let mut start = Vec::with_capacity(n + 1);
        let mut total = 0;
        for i in 0..n {
            start.push(total);
            total += i - first[i] + 1;
        }
        start.push(total);

        let mut values = vec![0.0; total];
        for &(r, c, v) in a.entries() {
            let (pr, pc) = (inv[r], inv[c]);
            if pr >= pc {
                values[start[pr] + pc - first[pr]] += v;
            }
        }

        let mut diag_orig = vec![0.0; n];
        for i in 0..n {
            diag_orig[i] = values[start[i] + i - first[i]];
        }

        for i in 0..n {
            let fi = first[i];
            for j in fi..i {
                let fj = first[j];
                let lo = fi.max(fj);
                let mut s = values[start[i] + j - fi];
                for k in lo..j {
                    s -= values[start[i] + k - fi] * values[start[j] + k - fj];
                }
                let djj = values[start[j] + j - fj];
                values[start[i] + j - fi] = s / djj;
            }
            let mut d = values[start[i] + i - fi];
            for k in fi..i {
                let l = values[start[i] + k - fi];
                d -= l * l;
            }
            if !(d > PIVOT_RELATIVE_TOL * diag_orig[i].abs()) || !d.is_finite() {
                return Err(NotPositiveDefinite { row: perm[i], pivot: d });
            }
            values[start[i] + i - fi] = d.sqrt();
        }
        Ok(Self { n, perm, first, start, values })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Stored entries of the factor, a measure of the envelope size.
    pub fn envelope_len(&self) -> usize {
        self.values.len()
    }

    fn at(&self, i: usize, j: usize) -> f64 {
        self.values[self.start[i] + j - self.first[i]]
    }

    pub fn solve(&self, rhs: &DVector<f64>) -> DVector<f64> {
        assert_eq!(rhs.len(), self.n);
        let n = self.n;
        let mut y: Vec<f64> = self.perm.iter().map(|&i| rhs[i]).collect();
        // forward: L y = P b
        for i in 0..n {
            let mut s = y[i];
            for k in self.first[i]..i {
                s -= self.at(i, k) * y[k];
            }
            y[i] = s / self.at(i, i);
        }
        // backward: Lᵀ x = y, column-oriented over the row-stored factor
        for i in (0..n).rev() {
            y[i] /= self.at(i, i);
            let xi = y[i];
            for k in self.first[i]..i {
                y[k] -= self.at(i, k) * xi;
            }
        }
        let mut x = DVector::zeros(n);
        for (k, &i) in self.perm.iter().enumerate() {
            x[i] = y[k];
        }
        x
    }
}

/// Reverse Cuthill–McKee ordering of the symmetric sparsity pattern.
///
/// Each component starts from a minimum-degree node; neighbours are visited
/// in ascending (degree, index) order, so the result is deterministic.
pub fn reverse_cuthill_mckee(a: &SparseMatrix) -> Vec<usize> {
    let n = a.rows();
    let mut adjacency = vec![Vec::new(); n];
    for &(r, c, _) in a.entries() {
        if r != c {
            adjacency[r].push(c);
            adjacency[c].push(r);
        }
    }
    for list in &mut adjacency {
        list.sort_unstable();
        list.dedup();
    }
    let degree: Vec<usize> = adjacency.iter().map(Vec::len).collect();

    let mut seeds: Vec<usize> = (0..n).collect();
    seeds.sort_by_key(|&v| (degree[v], v));

    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut queue = VecDeque::new();
    for &seed in &seeds {
        if visited[seed] {
            continue;
        }
        visited[seed] = true;
        queue.push_back(seed);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            let mut next: Vec<usize> =
                adjacency[v].iter().copied().filter(|&w| !visited[w]).collect();
            next.sort_by_key(|&w| (degree[w], w));
            for w in next {
                visited[w] = true;
                queue.push_back(w);
            }
        }
    }
    order.reverse();
    order
}
