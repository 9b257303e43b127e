use nalgebra::{DMatrix, DVector};

use super::SolverError;
use super::{resolve_sensors, run_model, solve_lcp, SensorDofs, SimParams, SimState, SteppingModel, Trajectory};
use crate::fem::ContactSystem;
use crate::lcp::{LcpError, LcpProblem};
use crate::linalg::SpdFactorization;

/// Full-order stepper for a fixed `h`: holds the factorization of
/// `M + h²K`, `G = (M + h²K)⁻¹Cᵀ` and the step-invariant LCP matrix
/// `A = h² C G`.
#[derive(Debug, Clone)]
pub struct FomStepper<'a> {
    sys: &'a ContactSystem,
    h: f64,
    factor: SpdFactorization,
    g: DMatrix<f64>,
    a: DMatrix<f64>,
}

impl<'a> FomStepper<'a> {
    pub fn new(sys: &'a ContactSystem, h: f64) -> Result<Self, SolverError> {
        if !(h > 0.0) || !h.is_finite() {
            return Err(SolverError::InvalidParams(format!("time step must be positive, got {h}")));
        }
        let s = sys.m.linear_combination(1.0, &sys.k, h * h)?;
        let factor = SpdFactorization::new(&s)?;
        let g = factor.solve_many(&sys.c.transpose_dense());
        let a = sys.c.mul_dense(&g) * (h * h);
        let a = (&a + a.transpose()) * 0.5;
        Ok(Self { sys, h, factor, g, a })
    }

    pub fn system(&self) -> &ContactSystem {
        self.sys
    }

    /// Contact-free predictor `u = (M + h²K)⁻¹(h² f(t+h) + 2M q(t) − M q(t−h))`.
    fn predictor(&self, st: &SimState, f_next: &DVector<f64>) -> DVector<f64> {
        let h2 = self.h * self.h;
        let rhs = f_next * h2 + self.sys.m.mul_vec(&(&st.q_curr * 2.0 - &st.q_prev));
        self.factor.solve(&rhs)
    }

    pub fn lcp(&self, st: &SimState, f_next: &DVector<f64>) -> Result<LcpProblem, LcpError> {
        let u = self.predictor(st, f_next);
        LcpProblem::new(self.a.clone(), self.sys.c.mul_vec(&u) + &self.sys.b)
    }

    /// One step under an explicit load `f(t+h)`.
    pub fn step_with_load(&self, st: &SimState, f_next: &DVector<f64>) -> Result<SimState, LcpError> {
        let u = self.predictor(st, f_next);
        let lambda = if self.sys.n_constraints() == 0 {
            DVector::zeros(0)
        } else {
            let p = LcpProblem::new(self.a.clone(), self.sys.c.mul_vec(&u) + &self.sys.b)?;
            solve_lcp(&p)?.lambda
        };
        let q_next = u + &self.g * &lambda * (self.h * self.h);
        Ok(SimState { t: st.t + self.h, q_curr: q_next, q_prev: st.q_curr.clone(), lambda })
    }
}

impl SteppingModel for FomStepper<'_> {
    fn dim(&self) -> usize {
        self.sys.n_free()
    }

    fn n_constraints(&self) -> usize {
        self.sys.n_constraints()
    }

    fn step_size(&self) -> f64 {
        self.h
    }

    fn step(&self, st: &SimState) -> Result<SimState, LcpError> {
        self.step_with_load(st, &self.sys.load.at(st.t + self.h))
    }

    fn gap(&self, q: &DVector<f64>) -> DVector<f64> {
        self.sys.gap(q)
    }

    fn energy(&self, q: &DVector<f64>, q_prev: &DVector<f64>) -> f64 {
        let v = (q - q_prev) / self.h;
        0.5 * self.sys.m.quad_form(&v) + 0.5 * self.sys.k.quad_form(q)
    }

    fn sensor_values(&self, q: &DVector<f64>, sensors: &[SensorDofs]) -> Vec<[f64; 2]> {
        let pick = |d: Option<usize>| d.map_or(0.0, |i| q[i]);
        sensors.iter().map(|s| [pick(s.ux), pick(s.uy)]).collect()
    }
}

/// Dynamic LCP for one step; factorizes `M + h²K` on every call; use
/// [`FomStepper`] to step repeatedly.
pub fn dynamic_lcp_assemble(
    sys: &ContactSystem,
    st: &SimState,
    h: f64,
    f_next: &DVector<f64>,
) -> Result<LcpProblem, SolverError> {
    check_state(sys, st)?;
    if f_next.len() != sys.n_free() {
        return Err(SolverError::DimensionMismatch { expected: sys.n_free(), found: f_next.len() });
    }
    Ok(FomStepper::new(sys, h)?.lcp(st, f_next)?)
}

/// One full-order step from `st` under the system's own load.
pub fn fom_step(sys: &ContactSystem, st: &SimState, h: f64) -> Result<SimState, SolverError> {
    check_state(sys, st)?;
    let stepper = FomStepper::new(sys, h)?;
    stepper.step(st).map_err(|source| SolverError::Lcp { step: 0, t: st.t + h, source })
}

fn check_state(sys: &ContactSystem, st: &SimState) -> Result<(), SolverError> {
    for v in [&st.q_curr, &st.q_prev] {
        if v.len() != sys.n_free() {
            return Err(SolverError::DimensionMismatch { expected: sys.n_free(), found: v.len() });
        }
    }
    Ok(())
}

/// Full-order simulation recording the given sensor nodes.
pub fn simulate(sys: &ContactSystem, p: &SimParams, sensor_nodes: &[usize]) -> Result<Trajectory, SolverError> {
    p.validate()?;
    let sensors = resolve_sensors(sys, sensor_nodes)?;
    let stepper = FomStepper::new(sys, p.h)?;
    let n = sys.n_free();
    let q0 = p.q0.clone().unwrap_or_else(|| DVector::zeros(n));
    let v0 = p.v0.clone().unwrap_or_else(|| DVector::zeros(n));
    run_model(&stepper, p, &q0, &v0, &sensors)
}
