//! Linear complementarity problems in the standard form
//!
//! ```text
//! w = B + A λ,   w ≥ 0,   λ ≥ 0,   λᵀw = 0
//! ```
//!
//! [`lemke_solve`] is the production solver. [`fb_newton_solve`] is an
//! alternative built on the Fischer-Burmeister reformulation and
//! [`brute_force_solve`] enumerates active sets for small test problems.

mod brute;
mod fb_newton;
mod lemke;

pub use brute::{brute_force_solve, MAX_BRUTE_FORCE_DIM};
pub use fb_newton::{fb_newton_solve, fb_residual, fischer_burmeister, FbNewton};
pub use lemke::{lemke_solve, Lemke};

use nalgebra::{DMatrix, DVector};

/// Complementarity tolerance.
pub const EPS_C: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LcpError {
    #[error("LCP matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },
    #[error("LCP vector has length {found}, matrix has {expected} rows")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("LCP data contains non-finite entries")]
    NonFinite,
    #[error("LCP has dimension zero")]
    Empty,
    #[error("LCP of dimension {0} is too large for active-set enumeration")]
    TooLarge(usize),
    #[error("LCP solver stopped with status {status:?} after {iterations} iterations")]
    Unsolved { status: LcpStatus, iterations: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct LcpProblem {
    a: DMatrix<f64>,
    b: DVector<f64>,
}

impl LcpProblem {
    pub fn new(a: DMatrix<f64>, b: DVector<f64>) -> Result<Self, LcpError> {
        if a.nrows() != a.ncols() {
            return Err(LcpError::NotSquare { rows: a.nrows(), cols: a.ncols() });
        }
        if b.len() != a.nrows() {
            return Err(LcpError::DimensionMismatch { expected: a.nrows(), found: b.len() });
        }
        if a.iter().chain(b.iter()).any(|v| !v.is_finite()) {
            return Err(LcpError::NonFinite);
        }
        Ok(Self { a, b })
    }

    pub fn dim(&self) -> usize {
        self.b.len()
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn b(&self) -> &DVector<f64> {
        &self.b
    }

    /// `w = B + A λ`.
    pub fn slack(&self, lambda: &DVector<f64>) -> DVector<f64> {
        &self.b + &self.a * lambda
    }

    /// `(cA, cB)`, which has the same solution set for `c > 0`.
    pub fn scaled(&self, c: f64) -> Self {
        Self { a: &self.a * c, b: &self.b * c }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LcpStatus {
    Solved,
    /// Lemke hit a secondary ray.
    RayTermination,
    IterationLimit,
    /// The FB-Newton line search could not reduce the merit function.
    StalledLineSearch,
    /// No active set passed the enumeration test.
    Infeasible,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LcpSolution {
    pub lambda: DVector<f64>,
    pub w: DVector<f64>,
    pub status: LcpStatus,
    /// Pivots (Lemke), Newton steps (FB) or tested subsets (enumeration).
    pub iterations: usize,
}

impl LcpSolution {
    pub fn is_solved(&self) -> bool {
        self.status == LcpStatus::Solved
    }

    /// Converts any non-`Solved` status into an error.
    pub fn into_result(self) -> Result<Self, LcpError> {
        match self.status {
            LcpStatus::Solved => Ok(self),
            status => Err(LcpError::Unsolved { status, iterations: self.iterations }),
        }
    }

    /// Largest violation of `λ ≥ 0`, `w ≥ 0` and `|λᵢwᵢ| ≤ eps (1 + ‖B‖∞)`
    /// scaled so that a value `≤ eps` means the solution is acceptable.
    pub fn violation(&self, p: &LcpProblem) -> f64 {
        let scale = 1.0 + p.b().amax();
        let w = p.slack(&self.lambda);
        let mut worst = 0.0f64;
        for i in 0..p.dim() {
            worst = worst.max(-self.lambda[i]).max(-w[i]).max((self.lambda[i] * w[i]).abs() / scale);
        }
        worst
    }

    pub fn satisfies_invariants(&self, p: &LcpProblem, eps: f64) -> bool {
        self.violation(p) <= eps
    }
}

/// Re-solves the equality system on the active set `{i : active[i]}`:
/// `A_SS λ_S = −B_S`, `λ = 0` elsewhere. Returns `None` if the block is
/// singular or the result leaves the feasible region by more than `eps`.
pub(crate) fn solve_on_active_set(p: &LcpProblem, active: &[bool], eps: f64) -> Option<DVector<f64>> {
    let idx: Vec<usize> = (0..p.dim()).filter(|&i| active[i]).collect();
    let mut lambda = DVector::zeros(p.dim());
    if !idx.is_empty() {
        let k = idx.len();
        let ass = DMatrix::from_fn(k, k, |r, c| p.a()[(idx[r], idx[c])]);
        let rhs = DVector::from_fn(k, |r, _| -p.b()[idx[r]]);
        let sol = ass.clone().lu().solve(&rhs)?;
        if sol.iter().any(|v| !v.is_finite()) {
            return None;
        }
        // reject near-singular blocks whose solve amplifies rounding
        let res = (&ass * &sol - &rhs).amax();
        if res > 1e-8 * (1.0 + rhs.amax()) {
            return None;
        }
        for (r, &i) in idx.iter().enumerate() {
            lambda[i] = sol[r];
        }
    }
    let w = p.slack(&lambda);
    let scale = 1.0 + p.b().amax();
    let ok = (0..p.dim()).all(|i| if active[i] { lambda[i] >= -eps } else { w[i] >= -eps * scale });
    ok.then_some(lambda)
}

/// Replaces `sol.lambda` by the active-set re-solve when that is at least as
/// accurate. Clamps roundoff-level negatives to zero.
pub(crate) fn polish(p: &LcpProblem, sol: &mut LcpSolution, active: &[bool]) {
    if let Some(lambda) = solve_on_active_set(p, active, EPS_C) {
        let candidate = LcpSolution { lambda, w: DVector::zeros(0), status: sol.status, iterations: sol.iterations };
        if candidate.violation(p) <= sol.violation(p).max(EPS_C * 1e-3) {
            sol.lambda = candidate.lambda;
        }
    }
    sol.lambda.iter_mut().filter(|v| **v < 0.0 && **v > -EPS_C).for_each(|v| *v = 0.0);
    sol.w = p.slack(&sol.lambda);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constructor_validates_shapes() {
        assert!(matches!(LcpProblem::new(DMatrix::zeros(2, 3), DVector::zeros(2)), Err(LcpError::NotSquare { .. })));
        assert!(matches!(
            LcpProblem::new(DMatrix::zeros(2, 2), DVector::zeros(3)),
            Err(LcpError::DimensionMismatch { .. })
        ));
        assert!(matches!(
            LcpProblem::new(DMatrix::from_element(1, 1, f64::NAN), DVector::zeros(1)),
            Err(LcpError::NonFinite)
        ));
    }

    #[test]
    fn violation_measures_each_condition() {
        let p = LcpProblem::new(DMatrix::identity(2, 2), DVector::from_vec(vec![-2.0, 3.0])).unwrap();
        let good = LcpSolution {
            lambda: DVector::from_vec(vec![2.0, 0.0]),
            w: DVector::from_vec(vec![0.0, 3.0]),
            status: LcpStatus::Solved,
            iterations: 0,
        };
        assert_eq!(good.violation(&p), 0.0);
        let bad = LcpSolution { lambda: DVector::from_vec(vec![0.0, 0.0]), ..good.clone() };
        assert_eq!(bad.violation(&p), 2.0);
    }
}
