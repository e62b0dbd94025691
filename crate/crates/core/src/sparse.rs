//! Coordinate-format sparse matrices used for the network operators.

use nalgebra::{DMatrix, DVector};

use crate::error::AssemblyError;

/// Sparse matrix stored as coalesced `(row, col, value)` triplets.
///
/// Entries are kept sorted by `(row, col)` and there is at most one entry per
/// position. Duplicates supplied at construction are summed in input order,
/// so assembly is reproducible run to run.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<(usize, usize, f64)>,
}

impl SparseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, entries: Vec::new() }
    }

    /// Builds a matrix from triplets, summing duplicates.
    ///
    /// Explicit zeros that result from coalescing are kept; they still mark
    /// structural positions.
    pub fn from_triplets(
        rows: usize,
        cols: usize,
        mut triplets: Vec<(usize, usize, f64)>,
    ) -> Result<Self, AssemblyError> {
        if let Some(&(r, c, _)) = triplets.iter().find(|&&(r, c, _)| r >= rows || c >= cols) {
            return Err(AssemblyError::IndexOutOfRange { row: r, col: c, rows, cols });
        }
        // stable sort keeps the input order of duplicates
        triplets.sort_by_key(|a| (a.0, a.1));
        let mut entries: Vec<(usize, usize, f64)> = Vec::with_capacity(triplets.len());
        for (r, c, v) in triplets {
            match entries.last_mut() {
                Some(last) if last.0 == r && last.1 == c => last.2 += v,
                _ => entries.push((r, c, v)),
            }
        }
        Ok(Self { rows, cols, entries })
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let n = values.len();
        let entries = values.iter().enumerate().map(|(i, &v)| (i, i, v)).collect();
        Self { rows: n, cols: n, entries }
    }

    /// Placement matrix `E` (n × |indices|) with `E[indices[j], j] = 1`.
    pub fn embedding(n: usize, indices: &[usize]) -> Result<Self, AssemblyError> {
        let triplets = indices.iter().enumerate().map(|(j, &i)| (i, j, 1.0)).collect();
        Self::from_triplets(n, indices.len(), triplets)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[(usize, usize, f64)] {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.entries
            .binary_search_by(|e| (e.0, e.1).cmp(&(row, col)))
            .map(|i| self.entries[i].2)
            .unwrap_or(0.0)
    }

    /// True when every stored entry lies on the diagonal of a square matrix.
    pub fn is_diagonal(&self) -> bool {
        self.rows == self.cols && self.entries.iter().all(|&(r, c, _)| r == c)
    }

    pub fn transpose(&self) -> Self {
        let triplets = self.entries.iter().map(|&(r, c, v)| (c, r, v)).collect::<Vec<_>>();
        // indices are already in range
        Self::from_triplets(self.cols, self.rows, triplets).expect("transpose stays in range")
    }

    pub fn mul_vec(&self, x: &DVector<f64>) -> Result<DVector<f64>, AssemblyError> {
        if x.len() != self.cols {
            return Err(AssemblyError::DimensionMismatch {
                context: "sparse matrix-vector product",
                expected: self.cols,
                found: x.len(),
            });
        }
        let mut y = DVector::zeros(self.rows);
        for &(r, c, v) in &self.entries {
            y[r] += v * x[c];
        }
        Ok(y)
    }

    pub fn mul_dense(&self, x: &DMatrix<f64>) -> Result<DMatrix<f64>, AssemblyError> {
        if x.nrows() != self.cols {
            return Err(AssemblyError::DimensionMismatch {
                context: "sparse matrix-matrix product",
                expected: self.cols,
                found: x.nrows(),
            });
        }
        let mut y = DMatrix::zeros(self.rows, x.ncols());
        for j in 0..x.ncols() {
            for &(r, c, v) in &self.entries {
                y[(r, j)] += v * x[(c, j)];
            }
        }
        Ok(y)
    }

    /// Sparse product `self · rhs`, coalesced deterministically.
    pub fn mul(&self, rhs: &SparseMatrix) -> Result<SparseMatrix, AssemblyError> {
        if self.cols != rhs.rows {
            return Err(AssemblyError::DimensionMismatch {
                context: "sparse matrix product",
                expected: self.cols,
                found: rhs.rows,
            });
        }
        let mut by_row: Vec<Vec<(usize, f64)>> = vec![Vec::new(); rhs.rows];
        for &(r, c, v) in &rhs.entries {
            by_row[r].push((c, v));
        }
        let mut triplets = Vec::new();
        for &(i, k, a) in &self.entries {
            for &(j, b) in &by_row[k] {
                triplets.push((i, j, a * b));
            }
        }
        SparseMatrix::from_triplets(self.rows, rhs.cols, triplets)
    }

    /// Restriction to the given row and column index lists, i.e. `E_rᵀ · self · E_c`.
    pub fn submatrix(&self, row_idx: &[usize], col_idx: &[usize]) -> SparseMatrix {
        let mut row_pos = vec![usize::MAX; self.rows];
        for (k, &i) in row_idx.iter().enumerate() {
            row_pos[i] = k;
        }
        let mut col_pos = vec![usize::MAX; self.cols];
        for (k, &j) in col_idx.iter().enumerate() {
            col_pos[j] = k;
        }
        let triplets = self
            .entries
            .iter()
            .filter_map(|&(r, c, v)| {
                let (pr, pc) = (row_pos[r], col_pos[c]);
                (pr != usize::MAX && pc != usize::MAX).then_some((pr, pc, v))
            })
            .collect();
        SparseMatrix::from_triplets(row_idx.len(), col_idx.len(), triplets)
            .expect("positions come from the index maps")
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.rows, self.cols);
        for &(r, c, v) in &self.entries {
            m[(r, c)] += v;
        }
        m
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, e| m.max(e.2.abs()))
    }
}
