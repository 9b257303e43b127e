//! Linear-algebra substrate: symmetric sparse storage, a reusable SPD
//! factorization and incremental orthonormalization. Dense matrices are
//! `nalgebra` types throughout.

mod gram_schmidt;
mod skyline;
mod sparse;

pub use gram_schmidt::{orthonormality_defect, orthonormalize_append, OrthonormalBasis, Rejected};
pub use skyline::SpdFactorization;
pub use sparse::SparseSymMatrix;

pub use nalgebra::{DMatrix, DVector};

/// Relative residual bound for factorized solves on well-conditioned problems.
pub const EPS_LIN: f64 = 1e-10;
/// Relative deflation threshold for Gram-Schmidt.
pub const EPS_DEF: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LinalgError {
    #[error("matrix is not positive definite (pivot {pivot:e} at row {row})")]
    NotPositiveDefinite { row: usize, pivot: f64 },
    #[error("entry ({row}, {col}) outside a {dim}x{dim} matrix")]
    IndexOutOfBounds { row: usize, col: usize, dim: usize },
    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
}

/// Dense SPD factorization (reduced matrices); errors like the sparse one.
pub fn dense_cholesky(a: &DMatrix<f64>) -> Result<nalgebra::Cholesky<f64, nalgebra::Dyn>, LinalgError> {
    if a.nrows() != a.ncols() {
        return Err(LinalgError::NotSquare { rows: a.nrows(), cols: a.ncols() });
    }
    a.clone().cholesky().ok_or(LinalgError::NotPositiveDefinite { row: 0, pivot: f64::NAN })
}

/// `max |A − Aᵀ|`.
pub fn symmetry_defect(a: &DMatrix<f64>) -> f64 {
    (a - a.transpose()).amax()
}
