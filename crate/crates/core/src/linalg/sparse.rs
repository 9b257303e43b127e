use std::io::{self, Write};

use nalgebra::{DMatrix, DVector};

use super::LinalgError;

/// Symmetric sparse matrix.
///
/// The canonical form is the upper triangle (`row <= col`) with merged
/// duplicates. Internally both triangles are kept in CSR order so that a row
/// is also the corresponding column, which makes block extraction and
/// products cheap.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSymMatrix {
    dim: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl SparseSymMatrix {
    /// Builds the matrix from `(row, col, value)` triplets.
    ///
    /// Entries may be given in either triangle; `(i, j)` and `(j, i)` name the
    /// same symmetric entry and are summed. Explicit zeros are dropped.
    pub fn from_triplets(
        dim: usize,
        triplets: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Self, LinalgError> {
        let mut upper: Vec<(usize, usize, f64)> = Vec::new();
        for (r, c, v) in triplets {
            if r >= dim || c >= dim {
                return Err(LinalgError::IndexOutOfBounds { row: r, col: c, dim });
            }
            let (r, c) = if r <= c { (r, c) } else { (c, r) };
            upper.push((r, c, v));
        }
        upper.sort_by_key(|t| (t.0, t.1));

        let mut merged: Vec<(usize, usize, f64)> = Vec::with_capacity(upper.len());
        for (r, c, v) in upper {
            match merged.last_mut() {
                Some(last) if last.0 == r && last.1 == c => last.2 += v,
                _ => merged.push((r, c, v)),
            }
        }
        merged.retain(|e| e.2 != 0.0);

        let mut full: Vec<(usize, usize, f64)> = Vec::with_capacity(2 * merged.len());
        for &(r, c, v) in &merged {
            full.push((r, c, v));
            if r != c {
                full.push((c, r, v));
            }
        }
        full.sort_by_key(|t| (t.0, t.1));

        let mut row_ptr = vec![0usize; dim + 1];
        for &(r, _, _) in &full {
            row_ptr[r + 1] += 1;
        }
        for i in 0..dim {
            row_ptr[i + 1] += row_ptr[i];
        }
        let col_idx = full.iter().map(|e| e.1).collect();
        let values = full.iter().map(|e| e.2).collect();
        Ok(Self { dim, row_ptr, col_idx, values })
    }

    /// Symmetric matrix from a dense one; only the upper triangle is read.
    pub fn from_dense(a: &DMatrix<f64>) -> Result<Self, LinalgError> {
        if a.nrows() != a.ncols() {
            return Err(LinalgError::NotSquare { rows: a.nrows(), cols: a.ncols() });
        }
        let n = a.nrows();
        let trip = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).map(|(i, j)| (i, j, a[(i, j)]));
        Self::from_triplets(n, trip)
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_triplets(dim, (0..dim).map(|i| (i, i, 1.0))).expect("indices in range")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of stored upper-triangle entries.
    pub fn nnz_upper(&self) -> usize {
        self.triplets().count()
    }

    /// Nonzeros of row `i` (equivalently column `i`) in ascending column order.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.row_ptr[i]..self.row_ptr[i + 1];
        self.col_idx[span.clone()].iter().copied().zip(self.values[span].iter().copied())
    }

    /// Canonical upper-triangle triplets, sorted by `(row, col)`.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.dim).flat_map(move |i| self.row(i).filter(move |&(j, _)| j >= i).map(move |(j, v)| (i, j, v)))
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let span = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.col_idx[span.clone()].binary_search(&j) {
            Ok(k) => self.values[span.start + k],
            Err(_) => 0.0,
        }
    }

    pub fn diagonal(&self) -> DVector<f64> {
        DVector::from_iterator(self.dim, (0..self.dim).map(|i| self.get(i, i)))
    }

    pub fn mul_vec(&self, x: &DVector<f64>) -> DVector<f64> {
        assert_eq!(x.len(), self.dim, "dimension mismatch in sparse product");
        DVector::from_iterator(self.dim, (0..self.dim).map(|i| self.row(i).map(|(j, v)| v * x[j]).sum()))
    }

    /// `self * x` for every column of `x`.
    pub fn mul_dense(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        assert_eq!(x.nrows(), self.dim, "dimension mismatch in sparse product");
        let mut out = DMatrix::zeros(self.dim, x.ncols());
        for c in 0..x.ncols() {
            let col = x.column(c);
            for i in 0..self.dim {
                out[(i, c)] = self.row(i).map(|(j, v)| v * col[j]).sum();
            }
        }
        out
    }

    pub fn quad_form(&self, x: &DVector<f64>) -> f64 {
        x.dot(&self.mul_vec(x))
    }

    /// `alpha * self + beta * other`.
    pub fn linear_combination(&self, alpha: f64, other: &Self, beta: f64) -> Result<Self, LinalgError> {
        if self.dim != other.dim {
            return Err(LinalgError::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        let trip = self
            .triplets()
            .map(|(i, j, v)| (i, j, alpha * v))
            .chain(other.triplets().map(|(i, j, v)| (i, j, beta * v)));
        Self::from_triplets(self.dim, trip)
    }

    /// Symmetric principal submatrix on `index` (new row `k` is old row `index[k]`).
    pub fn principal_submatrix(&self, index: &[usize]) -> Result<Self, LinalgError> {
        let mut local = vec![usize::MAX; self.dim];
        for (k, &g) in index.iter().enumerate() {
            local[g] = k;
        }
        let mut trip = Vec::new();
        for (k, &g) in index.iter().enumerate() {
            for (j, v) in self.row(g) {
                let lj = local[j];
                if lj != usize::MAX && lj >= k {
                    trip.push((k, lj, v));
                }
            }
        }
        Self::from_triplets(index.len(), trip)
    }

    /// Dense block `A[rows, cols]`.
    pub fn dense_block(&self, rows: &[usize], cols: &[usize]) -> DMatrix<f64> {
        let mut local = vec![usize::MAX; self.dim];
        for (k, &g) in cols.iter().enumerate() {
            local[g] = k;
        }
        let mut out = DMatrix::zeros(rows.len(), cols.len());
        for (r, &g) in rows.iter().enumerate() {
            for (j, v) in self.row(g) {
                if local[j] != usize::MAX {
                    out[(r, local[j])] = v;
                }
            }
        }
        out
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut out = DMatrix::zeros(self.dim, self.dim);
        for i in 0..self.dim {
            for (j, v) in self.row(i) {
                out[(i, j)] = v;
            }
        }
        out
    }

    /// Index of the leftmost nonzero in row `i`, the skyline profile start.
    pub(crate) fn first_col(&self, i: usize) -> usize {
        self.col_idx[self.row_ptr[i]..self.row_ptr[i + 1]].first().copied().map_or(i, |c| c.min(i))
    }

    /// Writes the matrix in Matrix Market coordinate format (`symmetric`,
    /// lower triangle, 1-based indices as the format requires).
    pub fn write_matrix_market<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "%%MatrixMarket matrix coordinate real symmetric")?;
        let lower: Vec<(usize, usize, f64)> = self.triplets().map(|(i, j, v)| (j, i, v)).collect();
        writeln!(w, "{} {} {}", self.dim, self.dim, lower.len())?;
        let mut lower = lower;
        lower.sort_by_key(|t| (t.1, t.0));
        for (r, c, v) in lower {
            writeln!(w, "{} {} {:e}", r + 1, c + 1, v)?;
        }
        Ok(())
    }
}
