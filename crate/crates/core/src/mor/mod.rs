//! Projection-based model order reduction `q = Qv` for the contact problem.
//!
//! Bases are built offline from `M`, `K`, the constraint structure and the
//! spatial load pattern only. The reduced dynamics keep the unreduced
//! constraints `C Q v + b ≥ 0`, so non-penetration is exact in full
//! coordinates.

mod basis;
mod reduced;

pub use basis::{
    craig_bampton_basis, craig_bampton_from_matrices, krylov_basis, krylov_basis_from_matrices, krylov_basis_shifted,
    modal_basis, modal_basis_from_matrices, BasisKind, ReductionBasis,
};
pub use reduced::{reduce, rom_step, simulate_rom, ReducedSystem, RomStepper};

use std::io::{self, Write};

use nalgebra::DMatrix;

use crate::linalg::LinalgError;
use crate::solver::SolverError;

#[derive(Debug, thiserror::Error)]
pub enum MorError {
    #[error("Krylov seed (load pattern) is zero")]
    ZeroSeed,
    #[error("slave stiffness block is not positive definite: {0}")]
    SingularSlaveBlock(LinalgError),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid reduction size: {0}")]
    InvalidSize(String),
    #[error("reduced {which} matrix is not positive definite")]
    NotPositiveDefinite { which: &'static str },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Solver(#[from] SolverError),
}

/// Dense matrix as text: a `rows cols` line followed by the entries in
/// column-major order, one per line.
pub fn write_dense<W: Write>(a: &DMatrix<f64>, mut w: W) -> io::Result<()> {
    writeln!(w, "{} {}", a.nrows(), a.ncols())?;
    for v in a.iter() {
        writeln!(w, "{v:e}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dense_export_is_column_major() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        let mut buf = Vec::new();
        write_dense(&a, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "2 2\n1e0\n3e0\n2e0\n4e0\n");
    }
}
