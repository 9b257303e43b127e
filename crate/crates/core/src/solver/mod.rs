//! Full-order static and dynamic contact solvers.
//!
//! The dynamic scheme replaces `q̈(t+h)` by `(q(t+h) − 2q(t) + q(t−h)) / h²`,
//! which gives the two-step implicit Euler update
//!
//! ```text
//! q(t+h) = (M + h²K)⁻¹ (h² f(t+h) + h² Cᵀλ(t+h) + 2M q(t) − M q(t−h))
//! ```
//!
//! with λ(t+h) from an LCP solved every step.

mod dynamic;
mod statics;
mod trajectory;

pub use dynamic::{dynamic_lcp_assemble, fom_step, simulate, FomStepper};
pub use statics::{kkt_residuals, static_lcp_assemble, static_solve, KktResiduals, StaticLcp, StaticSolution};
pub use trajectory::{Trajectory, TrajectoryCsvError};

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::fem::{Axis, ContactSystem, FemError};
use crate::lcp::{fb_newton_solve, lemke_solve, LcpError, LcpProblem, LcpSolution};
use crate::linalg::LinalgError;

#[derive(Debug, thiserror::Error)]
pub enum SolverError {
    #[error(transparent)]
    Fem(#[from] FemError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("LCP failed at step {step} (t = {t}): {source}")]
    Lcp { step: usize, t: f64, source: LcpError },
    #[error("invalid simulation parameters: {0}")]
    InvalidParams(String),
    #[error("sensor node {0} does not exist")]
    SensorNotFound(usize),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
}

impl From<LcpError> for SolverError {
    fn from(source: LcpError) -> Self {
        SolverError::Lcp { step: 0, t: f64::NAN, source }
    }
}

/// Lemke first; FB-Newton from zero as a fallback when Lemke reports a ray
/// or the pivot limit.
pub fn solve_lcp(p: &LcpProblem) -> Result<LcpSolution, LcpError> {
    let sol = lemke_solve(p);
    if sol.is_solved() {
        return Ok(sol);
    }
    let retry = fb_newton_solve(p, &DVector::zeros(p.dim()));
    if retry.is_solved() {
        Ok(retry)
    } else {
        sol.into_result()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimParams {
    pub h: f64,
    #[serde(default)]
    pub t0: f64,
    pub t_end: f64,
    /// Initial displacement (zero when absent).
    #[serde(skip)]
    pub q0: Option<DVector<f64>>,
    /// Initial velocity (zero when absent).
    #[serde(skip)]
    pub v0: Option<DVector<f64>>,
}

impl Default for SimParams {
    fn default() -> Self {
        Self { h: 0.05, t0: 0.0, t_end: 20.0, q0: None, v0: None }
    }
}

impl SimParams {
    pub fn new(h: f64, t0: f64, t_end: f64) -> Self {
        Self { h, t0, t_end, q0: None, v0: None }
    }

    pub fn validate(&self) -> Result<(), SolverError> {
        if !(self.h > 0.0) || !self.h.is_finite() {
            return Err(SolverError::InvalidParams(format!("time step must be positive, got {}", self.h)));
        }
        if !(self.t_end >= self.t0) {
            return Err(SolverError::InvalidParams(format!("t_end {} precedes t0 {}", self.t_end, self.t0)));
        }
        Ok(())
    }

    /// Number of steps after `t0`; `t_end` is rounded to the step grid.
    pub fn steps(&self) -> usize {
        ((self.t_end - self.t0) / self.h).round() as usize
    }

    /// `t0 + k h`, computed without accumulating roundoff.
    pub fn time(&self, k: usize) -> f64 {
        self.t0 + k as f64 * self.h
    }
}

/// Two-step integrator memory.
#[derive(Debug, Clone, PartialEq)]
pub struct SimState {
    pub t: f64,
    pub q_curr: DVector<f64>,
    pub q_prev: DVector<f64>,
    pub lambda: DVector<f64>,
}

impl SimState {
    pub fn at_rest(t: f64, n: usize, m: usize) -> Self {
        Self { t, q_curr: DVector::zeros(n), q_prev: DVector::zeros(n), lambda: DVector::zeros(m) }
    }
}

/// Free DOFs of a sensor node; `None` for a fixed axis (always zero).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SensorDofs {
    pub node: usize,
    pub ux: Option<usize>,
    pub uy: Option<usize>,
}

pub fn resolve_sensors(sys: &ContactSystem, nodes: &[usize]) -> Result<Vec<SensorDofs>, SolverError> {
    nodes
        .iter()
        .map(|&node| {
            if node >= sys.dof_map.node_count() {
                return Err(SolverError::SensorNotFound(node));
            }
            Ok(SensorDofs { node, ux: sys.dof_map.dof(node, Axis::X), uy: sys.dof_map.dof(node, Axis::Y) })
        })
        .collect()
}

/// A time-discrete second-order model with unilateral constraints, stepped
/// by the two-step scheme. Implemented by the full-order stepper and by the
/// reduced one.
pub trait SteppingModel {
    /// Length of the state vector.
    fn dim(&self) -> usize;
    fn n_constraints(&self) -> usize;
    fn step_size(&self) -> f64;
    /// Advances `st` by one step, solving the contact LCP at the new time.
    fn step(&self, st: &SimState) -> Result<SimState, LcpError>;
    /// `Cq + b` in full coordinates.
    fn gap(&self, q: &DVector<f64>) -> DVector<f64>;
    /// `½ q̇ᵀMq̇ + ½ qᵀKq` with the backward-difference velocity.
    fn energy(&self, q: &DVector<f64>, q_prev: &DVector<f64>) -> f64;
    /// Full-coordinate `(ux, uy)` of each sensor.
    fn sensor_values(&self, q: &DVector<f64>, sensors: &[SensorDofs]) -> Vec<[f64; 2]>;
}

/// Explicit Euler start `q(t0+h) = q0 + h v0`, then the two-step scheme up
/// to `t_end`. The state is recorded at every step, `t0` included.
pub fn run_model<S: SteppingModel>(
    model: &S,
    p: &SimParams,
    q0: &DVector<f64>,
    v0: &DVector<f64>,
    sensors: &[SensorDofs],
) -> Result<Trajectory, SolverError> {
    p.validate()?;
    let n = model.dim();
    let m = model.n_constraints();
    for v in [q0, v0] {
        if v.len() != n {
            return Err(SolverError::DimensionMismatch { expected: n, found: v.len() });
        }
    }
    if (model.step_size() - p.h).abs() > 1e-15 * p.h {
        return Err(SolverError::InvalidParams(format!(
            "model built for h = {}, run uses h = {}",
            model.step_size(),
            p.h
        )));
    }
    let h = p.h;
    let steps = p.steps();
    let mut traj = Trajectory::new(sensors.len(), m);

    let q_back = q0 - v0 * h;
    let mut st = SimState { t: p.t0, q_curr: q0.clone(), q_prev: q_back, lambda: DVector::zeros(m) };
    record(model, &mut traj, &st, sensors);
    if steps == 0 {
        return Ok(traj);
    }
    st = SimState { t: p.time(1), q_curr: q0 + v0 * h, q_prev: q0.clone(), lambda: DVector::zeros(m) };
    record(model, &mut traj, &st, sensors);
    for k in 2..=steps {
        let mut next = model.step(&st).map_err(|source| SolverError::Lcp { step: k, t: p.time(k), source })?;
        next.t = p.time(k);
        st = next;
        record(model, &mut traj, &st, sensors);
    }
    Ok(traj)
}

fn record<S: SteppingModel>(model: &S, traj: &mut Trajectory, st: &SimState, sensors: &[SensorDofs]) {
    traj.push(
        st.t,
        &model.sensor_values(&st.q_curr, sensors),
        st.lambda.as_slice(),
        model.gap(&st.q_curr).as_slice(),
        model.energy(&st.q_curr, &st.q_prev),
    );
}
