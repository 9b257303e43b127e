use nalgebra::{DMatrix, DVector};

use super::{solve_lcp, SolverError};
use crate::fem::ContactSystem;
use crate::lcp::LcpProblem;
use crate::linalg::SpdFactorization;

/// Static contact LCP `A = C K⁻¹ Cᵀ`, `B = C K⁻¹ f + b` together with the
/// cached solves needed to recover the displacements.
#[derive(Debug, Clone)]
pub struct StaticLcp {
    pub problem: LcpProblem,
    /// `K⁻¹ f`
    pub k_inv_f: DVector<f64>,
    /// `K⁻¹ Cᵀ`, one column per constraint.
    pub k_inv_ct: DMatrix<f64>,
}

impl StaticLcp {
    /// `q = K⁻¹(f + Cᵀλ)`.
    pub fn displacement(&self, lambda: &DVector<f64>) -> DVector<f64> {
        &self.k_inv_f + &self.k_inv_ct * lambda
    }
}

pub fn static_lcp_assemble(sys: &ContactSystem, f: &DVector<f64>) -> Result<StaticLcp, SolverError> {
    if f.len() != sys.n_free() {
        return Err(SolverError::DimensionMismatch { expected: sys.n_free(), found: f.len() });
    }
    let kf = SpdFactorization::new(&sys.k)?;
    let k_inv_f = kf.solve(f);
    let k_inv_ct = kf.solve_many(&sys.c.transpose_dense());
    let a = sys.c.mul_dense(&k_inv_ct);
    // symmetrize away the roundoff of the m separate solves
    let a = (&a + a.transpose()) * 0.5;
    let b = sys.c.mul_vec(&k_inv_f) + &sys.b;
    Ok(StaticLcp { problem: LcpProblem::new(a, b)?, k_inv_f, k_inv_ct })
}

#[derive(Debug, Clone)]
pub struct StaticSolution {
    pub q: DVector<f64>,
    pub lambda: DVector<f64>,
}

/// Equilibrium under the load `f`: λ from the LCP, then `q = K⁻¹(f + Cᵀλ)`.
pub fn static_solve(sys: &ContactSystem, f: &DVector<f64>) -> Result<StaticSolution, SolverError> {
    let lcp = static_lcp_assemble(sys, f)?;
    let lambda = if sys.n_constraints() == 0 {
        DVector::zeros(0)
    } else {
        solve_lcp(&lcp.problem).map_err(|source| SolverError::Lcp { step: 0, t: f64::NAN, source })?.lambda
    };
    Ok(StaticSolution { q: lcp.displacement(&lambda), lambda })
}

/// Residuals of the static KKT system.
#[derive(Debug, Clone, Copy)]
pub struct KktResiduals {
    /// `‖Kq − f − Cᵀλ‖`
    pub equilibrium: f64,
    /// `max(0, −min(Cq + b))`
    pub penetration: f64,
    /// `max(0, −min λ)`
    pub negative_multiplier: f64,
    /// `|λᵀ(Cq + b)|`
    pub complementarity: f64,
}

pub fn kkt_residuals(sys: &ContactSystem, f: &DVector<f64>, sol: &StaticSolution) -> KktResiduals {
    let eq = sys.k.mul_vec(&sol.q) - f - sys.c.tr_mul_vec(&sol.lambda);
    let gap = sys.gap(&sol.q);
    KktResiduals {
        equilibrium: eq.norm(),
        penetration: gap.iter().fold(0.0f64, |acc, &g| acc.max(-g)),
        negative_multiplier: sol.lambda.iter().fold(0.0f64, |acc, &l| acc.max(-l)),
        complementarity: sol.lambda.dot(&gap).abs(),
    }
}
