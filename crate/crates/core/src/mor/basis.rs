use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::MorError;
use crate::fem::ContactSystem;
use crate::linalg::{dense_cholesky, OrthonormalBasis, SparseSymMatrix, SpdFactorization};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisKind {
    Krylov,
    Modal,
    CraigBampton,
}

#[derive(Debug, Clone)]
pub struct ReductionBasis {
    /// `n_free × n_r`
    pub q: DMatrix<f64>,
    pub kind: BasisKind,
    /// Master DOFs (Craig-Bampton only), ascending; constraint-mode column
    /// `k` is the unit response to master `master[k]`.
    pub master: Vec<usize>,
    /// Slave-mode columns (Craig-Bampton only).
    pub n_k: usize,
}

impl ReductionBasis {
    pub fn n_full(&self) -> usize {
        self.q.nrows()
    }

    pub fn n_r(&self) -> usize {
        self.q.ncols()
    }

    /// Constraint-mode columns (Craig-Bampton only).
    pub fn n_c(&self) -> usize {
        self.master.len()
    }

    /// True when `QᵀQ = I` is an invariant of the basis kind.
    pub fn is_orthonormal(&self) -> bool {
        self.kind == BasisKind::Krylov
    }
}

/// Arnoldi on `op` from `first`, kept orthonormal by two-pass Gram-Schmidt.
/// Stops at `n` vectors or on deflation.
fn arnoldi(
    first: DVector<f64>,
    n: usize,
    op: impl Fn(&DVector<f64>) -> DVector<f64>,
) -> Result<DMatrix<f64>, MorError> {
    let dim = first.len();
    let mut basis = OrthonormalBasis::new(dim);
    if first.amax() == 0.0 || basis.try_append(&first).is_err() {
        return Err(MorError::ZeroSeed);
    }
    while basis.len() < n.min(dim) {
        let last = basis.columns().last().expect("basis is non-empty").clone();
        if basis.try_append(&op(&last)).is_err() {
            break;
        }
    }
    Ok(basis.to_matrix())
}

fn check_size(n: usize, n_free: usize) -> Result<(), MorError> {
    if n == 0 || n > n_free {
        return Err(MorError::InvalidSize(format!("requested {n} vectors for {n_free} degrees of freedom")));
    }
    Ok(())
}

/// Orthonormal basis of `span{K⁻¹f₀, (K⁻¹M)K⁻¹f₀, …}` with `f₀` the unit
/// load pattern. May return fewer than `n_r` columns if the Krylov space
/// is exhausted.
pub fn krylov_basis(sys: &ContactSystem, n_r: usize) -> Result<ReductionBasis, MorError> {
    krylov_basis_from_matrices(&sys.m, &sys.k, &sys.load.pattern, n_r)
}

pub fn krylov_basis_from_matrices(
    m: &SparseSymMatrix,
    k: &SparseSymMatrix,
    seed: &DVector<f64>,
    n_r: usize,
) -> Result<ReductionBasis, MorError> {
    krylov_shifted(m, k, seed, n_r, 0.0)
}

/// Krylov basis expanded at `ω²`: `K_ω = K − ω²M`, which must stay positive
/// definite.
pub fn krylov_basis_shifted(sys: &ContactSystem, n_r: usize, omega_sq: f64) -> Result<ReductionBasis, MorError> {
    krylov_shifted(&sys.m, &sys.k, &sys.load.pattern, n_r, omega_sq)
}

fn krylov_shifted(
    m: &SparseSymMatrix,
    k: &SparseSymMatrix,
    seed: &DVector<f64>,
    n_r: usize,
    omega_sq: f64,
) -> Result<ReductionBasis, MorError> {
    let n = k.dim();
    if m.dim() != n || seed.len() != n {
        return Err(MorError::DimensionMismatch {
            expected: n,
            found: if m.dim() != n { m.dim() } else { seed.len() },
        });
    }
    check_size(n_r, n)?;
    let k_omega = if omega_sq == 0.0 { k.clone() } else { k.linear_combination(1.0, m, -omega_sq)? };
    let fk = SpdFactorization::new(&k_omega)?;
    let q = arnoldi(fk.solve(seed), n_r, |v| fk.solve(&m.mul_vec(v)))?;
    Ok(ReductionBasis { q, kind: BasisKind::Krylov, master: Vec::new(), n_k: 0 })
}

/// The `n_r` lowest eigenmodes of `ω² M y = K y`, normalized to `YᵀMY = I`.
/// Dense; meant for moderate sizes.
pub fn modal_basis(sys: &ContactSystem, n_r: usize) -> Result<ReductionBasis, MorError> {
    modal_basis_from_matrices(&sys.m, &sys.k, n_r).map(|(b, _)| b)
}

/// Also returns the eigenvalues `ω²`, ascending.
pub fn modal_basis_from_matrices(
    m: &SparseSymMatrix,
    k: &SparseSymMatrix,
    n_r: usize,
) -> Result<(ReductionBasis, Vec<f64>), MorError> {
    let n = k.dim();
    if m.dim() != n {
        return Err(MorError::DimensionMismatch { expected: n, found: m.dim() });
    }
    check_size(n_r, n)?;
    // M = LLᵀ; L⁻¹KL⁻ᵀ z = ω² z; y = L⁻ᵀz
    let chol = dense_cholesky(&m.to_dense())?;
    let l = chol.l();
    let kd = k.to_dense();
    let x = l.solve_lower_triangular(&kd).expect("Cholesky factor has a nonzero diagonal");
    let s = l.solve_lower_triangular(&x.transpose()).expect("Cholesky factor has a nonzero diagonal");
    let s = (&s + s.transpose()) * 0.5;
    let eig = SymmetricEigen::new(s);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]).then(a.cmp(&b)));
    let lt = l.transpose();
    let mut y = DMatrix::zeros(n, n_r);
    let mut values = Vec::with_capacity(n_r);
    for (c, &i) in order.iter().take(n_r).enumerate() {
        let mut z = eig.eigenvectors.column(i).into_owned();
        // deterministic sign: largest entry positive
        if z.iamax() < n && z[z.iamax()] < 0.0 {
            z = -z;
        }
        let yc = lt.solve_upper_triangular(&z).expect("Cholesky factor has a nonzero diagonal");
        y.set_column(c, &yc);
        values.push(eig.eigenvalues[i]);
    }
    Ok((ReductionBasis { q: y, kind: BasisKind::Modal, master: Vec::new(), n_k: 0 }, values))
}

/// Craig-Bampton basis with every DOF of every contact node as master:
/// `Q = [[I, 0], [−K_SS⁻¹K_SM, Q_S]]` in (master, slave) blocks, `Q_S` an
/// orthonormal Krylov basis of the slave system with `n_k` columns.
pub fn craig_bampton_basis(sys: &ContactSystem, n_k: usize) -> Result<ReductionBasis, MorError> {
    craig_bampton_from_matrices(&sys.m, &sys.k, &sys.contact_node_dofs(), &sys.load.pattern, n_k)
}

pub fn craig_bampton_from_matrices(
    m: &SparseSymMatrix,
    k: &SparseSymMatrix,
    master: &[usize],
    seed: &DVector<f64>,
    n_k: usize,
) -> Result<ReductionBasis, MorError> {
    let n = k.dim();
    if m.dim() != n || seed.len() != n {
        return Err(MorError::DimensionMismatch {
            expected: n,
            found: if m.dim() != n { m.dim() } else { seed.len() },
        });
    }
    let mut master = master.to_vec();
    master.sort_unstable();
    master.dedup();
    if master.iter().any(|&d| d >= n) || master.is_empty() {
        return Err(MorError::InvalidSize("master set is empty or out of range".into()));
    }
    let mut is_master = vec![false; n];
    for &d in &master {
        is_master[d] = true;
    }
    let slave: Vec<usize> = (0..n).filter(|&d| !is_master[d]).collect();
    let n_c = master.len();
    check_size(n_k, slave.len())?;

    let k_ss = k.principal_submatrix(&slave)?;
    let m_ss = m.principal_submatrix(&slave)?;
    let fss = SpdFactorization::new(&k_ss).map_err(MorError::SingularSlaveBlock)?;
    let psi = -fss.solve_many(&k.dense_block(&slave, &master));

    let f_s = DVector::from_iterator(slave.len(), slave.iter().map(|&d| seed[d]));
    let first = if f_s.amax() > 0.0 {
        fss.solve(&f_s)
    } else {
        // load acts on masters only: follow its static path into the slaves
        let f_m = DVector::from_iterator(n_c, master.iter().map(|&d| seed[d]));
        &psi * f_m
    };
    let q_s = arnoldi(first, n_k, |v| fss.solve(&m_ss.mul_vec(v)))?;

    let n_k = q_s.ncols();
    let mut q = DMatrix::zeros(n, n_c + n_k);
    for (c, &d) in master.iter().enumerate() {
        q[(d, c)] = 1.0;
    }
    for (r, &d) in slave.iter().enumerate() {
        for c in 0..n_c {
            q[(d, c)] = psi[(r, c)];
        }
        for c in 0..n_k {
            q[(d, n_c + c)] = q_s[(r, c)];
        }
    }
    Ok(ReductionBasis { q, kind: BasisKind::CraigBampton, master, n_k })
}
