use nalgebra::{DMatrix, DVector};

use super::EPS_DEF;

/// The candidate vector lies (numerically) in the span of the basis.
#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
#[error("vector rejected: residual norm {residual:e} after projection (original norm {original:e})")]
pub struct Rejected {
    pub residual: f64,
    pub original: f64,
}

/// Orthonormal column set grown one vector at a time with two passes of
/// modified Gram-Schmidt.
#[derive(Debug, Clone)]
pub struct OrthonormalBasis {
    dim: usize,
    cols: Vec<DVector<f64>>,
    tol: f64,
}

impl OrthonormalBasis {
    pub fn new(dim: usize) -> Self {
        Self::with_tolerance(dim, EPS_DEF)
    }

    /// `tol` is the deflation threshold relative to the incoming vector norm.
    pub fn with_tolerance(dim: usize, tol: f64) -> Self {
        Self { dim, cols: Vec::new(), tol }
    }

    pub fn from_matrix(q: &DMatrix<f64>) -> Self {
        Self { dim: q.nrows(), cols: q.column_iter().map(|c| c.into_owned()).collect(), tol: EPS_DEF }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.cols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cols.is_empty()
    }

    pub fn columns(&self) -> &[DVector<f64>] {
        &self.cols
    }

    /// Orthogonalizes `v` against the basis and appends it normalized.
    /// Returns the appended column.
    pub fn try_append(&mut self, v: &DVector<f64>) -> Result<&DVector<f64>, Rejected> {
        assert_eq!(v.len(), self.dim, "vector length does not match basis");
        let original = v.norm();
        let mut w = v.clone();
        for _pass in 0..2 {
            for q in &self.cols {
                let c = q.dot(&w);
                w.axpy(-c, q, 1.0);
            }
        }
        let residual = w.norm();
        if !(residual > self.tol * original) || residual == 0.0 {
            return Err(Rejected { residual, original });
        }
        w /= residual;
        self.cols.push(w);
        Ok(self.cols.last().expect("just pushed"))
    }

    pub fn to_matrix(&self) -> DMatrix<f64> {
        if self.cols.is_empty() {
            DMatrix::zeros(self.dim, 0)
        } else {
            DMatrix::from_columns(&self.cols)
        }
    }
}

/// Returns `basis` with the orthonormalized `v` appended as a new column.
pub fn orthonormalize_append(basis: &DMatrix<f64>, v: &DVector<f64>) -> Result<DMatrix<f64>, Rejected> {
    let mut b = OrthonormalBasis::from_matrix(basis);
    b.try_append(v)?;
    Ok(b.to_matrix())
}

/// `max |QᵀQ − I|`.
pub fn orthonormality_defect(q: &DMatrix<f64>) -> f64 {
    let g = q.transpose() * q;
    (g - DMatrix::identity(q.ncols(), q.ncols())).amax()
}
