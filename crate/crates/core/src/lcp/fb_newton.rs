use nalgebra::{DMatrix, DVector};

use super::{polish, LcpProblem, LcpSolution, LcpStatus, EPS_C};

/// Fischer-Burmeister NCP function `√(a² + b²) − a − b`.
///
/// Zero exactly when `a ≥ 0`, `b ≥ 0` and `ab = 0`.
pub fn fischer_burmeister(a: f64, b: f64) -> f64 {
    a.hypot(b) - a - b
}

/// Componentwise `φ(B + Aλ, λ)`.
pub fn fb_residual(p: &LcpProblem, lambda: &DVector<f64>) -> DVector<f64> {
    let w = p.slack(lambda);
    w.zip_map(lambda, fischer_burmeister)
}

/// Semismooth Newton iteration on the Fischer-Burmeister residual with an
/// Armijo line search on the merit `½‖φ‖²`.
#[derive(Debug, Clone, Copy)]
pub struct FbNewton {
    pub max_iterations: usize,
    pub tol: f64,
    /// Sufficient-decrease constant of the Armijo rule.
    pub armijo: f64,
    pub min_step: f64,
}

impl Default for FbNewton {
    fn default() -> Self {
        Self { max_iterations: 100, tol: EPS_C, armijo: 1e-4, min_step: 1e-12 }
    }
}

pub fn fb_newton_solve(p: &LcpProblem, lambda0: &DVector<f64>) -> LcpSolution {
    FbNewton::default().solve(p, lambda0)
}

fn merit(phi: &DVector<f64>) -> f64 {
    0.5 * phi.norm_squared()
}

impl FbNewton {
    pub fn solve(&self, p: &LcpProblem, lambda0: &DVector<f64>) -> LcpSolution {
        self.solve_with_history(p, lambda0).0
    }

    /// Also returns the merit value after every accepted step (first entry is
    /// the starting merit).
    pub fn solve_with_history(&self, p: &LcpProblem, lambda0: &DVector<f64>) -> (LcpSolution, Vec<f64>) {
        assert_eq!(lambda0.len(), p.dim(), "starting point has the wrong length");
        let m = p.dim();
        let mut lambda = lambda0.clone();
        let mut phi = fb_residual(p, &lambda);
        let mut history = vec![merit(&phi)];
        let mut iterations = 0;

        let status = loop {
            if phi.amax() <= self.tol {
                break LcpStatus::Solved;
            }
            if iterations >= self.max_iterations {
                break LcpStatus::IterationLimit;
            }
            let jac = self.generalized_jacobian(p, &lambda);
            let grad = jac.transpose() * &phi;
            let newton = jac.clone().lu().solve(&(-&phi)).filter(|d| d.iter().all(|v| v.is_finite()));
            let dir = match newton {
                Some(d) if grad.dot(&d) < 0.0 => d,
                _ => -&grad,
            };
            let slope = grad.dot(&dir);
            let f0 = merit(&phi);
            let mut step = 1.0;
            let accepted = loop {
                let trial = &lambda + &dir * step;
                let phi_t = fb_residual(p, &trial);
                let f_t = merit(&phi_t);
                if f_t <= f0 + self.armijo * step * slope && f_t < f0 {
                    break Some((trial, phi_t, f_t));
                }
                step *= 0.5;
                if step < self.min_step {
                    break None;
                }
            };
            iterations += 1;
            match accepted {
                Some((l, ph, f)) => {
                    lambda = l;
                    phi = ph;
                    history.push(f);
                }
                None => break LcpStatus::StalledLineSearch,
            }
        };

        let w = p.slack(&lambda);
        let active: Vec<bool> = (0..m).map(|i| lambda[i] > w[i]).collect();
        let mut sol = LcpSolution { lambda, w, status, iterations };
        if sol.status != LcpStatus::IterationLimit {
            polish(p, &mut sol, &active);
            // the line search can stall on roundoff right next to the solution
            if sol.status == LcpStatus::StalledLineSearch && fb_residual(p, &sol.lambda).amax() <= self.tol {
                sol.status = LcpStatus::Solved;
            }
        }
        (sol, history)
    }

    /// Element of the generalized Jacobian `diag(da) A + diag(db)`. At the
    /// kink `(0, 0)` the limit along direction `(1, 1)` is used.
    fn generalized_jacobian(&self, p: &LcpProblem, lambda: &DVector<f64>) -> DMatrix<f64> {
        let m = p.dim();
        let w = p.slack(lambda);
        let mut jac = DMatrix::zeros(m, m);
        for i in 0..m {
            let r = w[i].hypot(lambda[i]);
            let (da, db) = if r > 0.0 {
                (w[i] / r - 1.0, lambda[i] / r - 1.0)
            } else {
                let s = std::f64::consts::FRAC_1_SQRT_2 - 1.0;
                (s, s)
            };
            for j in 0..m {
                jac[(i, j)] = da * p.a()[(i, j)];
            }
            jac[(i, i)] += db;
        }
        jac
    }
}
