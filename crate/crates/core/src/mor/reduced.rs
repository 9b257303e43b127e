use nalgebra::{Cholesky, DMatrix, DVector, Dyn, SymmetricEigen};

use super::{MorError, ReductionBasis};
use crate::fem::{ContactSystem, Load};
use crate::lcp::{LcpError, LcpProblem};
use crate::linalg::dense_cholesky;
use crate::solver::{
    resolve_sensors, run_model, solve_lcp, SensorDofs, SimParams, SimState, SteppingModel, Trajectory,
};

/// `M̂ v̈ + K̂ v = Qᵀ(f(t) + Cᵀλ)` with the exact constraint `Ĉ v + b ≥ 0`,
/// `Ĉ = CQ`.
#[derive(Debug, Clone)]
pub struct ReducedSystem {
    pub mhat: DMatrix<f64>,
    pub khat: DMatrix<f64>,
    /// `m × n_r`
    pub chat: DMatrix<f64>,
    pub b: DVector<f64>,
    /// Reduced load `Qᵀ pattern · profile(t)`.
    pub load: Load,
    pub basis: ReductionBasis,
}

impl ReducedSystem {
    pub fn n_r(&self) -> usize {
        self.basis.n_r()
    }

    pub fn n_constraints(&self) -> usize {
        self.chat.nrows()
    }

    /// `q = Qv`.
    pub fn expand(&self, v: &DVector<f64>) -> DVector<f64> {
        &self.basis.q * v
    }

    /// Reduced coordinates of a full vector: `Qᵀq` for an orthonormal basis,
    /// the least-squares solution of `Qv ≈ q` otherwise.
    pub fn project(&self, q: &DVector<f64>) -> DVector<f64> {
        let qt = self.basis.q.transpose();
        if self.basis.is_orthonormal() {
            return qt * q;
        }
        let gram = &qt * &self.basis.q;
        match Cholesky::new(gram) {
            Some(ch) => ch.solve(&(qt * q)),
            None => self.basis.q.clone().svd(true, true).solve(q, 1e-14).expect("SVD computed both factors"),
        }
    }

    pub fn gap(&self, v: &DVector<f64>) -> DVector<f64> {
        &self.chat * v + &self.b
    }
}

/// Projects the system onto `basis` and checks `M̂` SPD and `K̂` PSD.
pub fn reduce(sys: &ContactSystem, basis: &ReductionBasis) -> Result<ReducedSystem, MorError> {
    let q = &basis.q;
    if q.nrows() != sys.n_free() {
        return Err(MorError::DimensionMismatch { expected: sys.n_free(), found: q.nrows() });
    }
    let qt = q.transpose();
    let sym = |a: DMatrix<f64>| (&a + a.transpose()) * 0.5;
    let mhat = sym(&qt * sys.m.mul_dense(q));
    let khat = sym(&qt * sys.k.mul_dense(q));
    let chat = sys.c.mul_dense(q);
    if dense_cholesky(&mhat).is_err() {
        return Err(MorError::NotPositiveDefinite { which: "mass" });
    }
    let eig = SymmetricEigen::new(khat.clone());
    let scale = khat.amax().max(f64::MIN_POSITIVE);
    if eig.eigenvalues.iter().any(|&l| l < -1e-10 * scale) {
        return Err(MorError::NotPositiveDefinite { which: "stiffness" });
    }
    let load = Load { pattern: &qt * &sys.load.pattern, profile: sys.load.profile };
    Ok(ReducedSystem { mhat, khat, chat, b: sys.b.clone(), load, basis: basis.clone() })
}

/// Reduced stepper for a fixed `h`: Cholesky of `M̂ + h²K̂`,
/// `Ĝ = (M̂ + h²K̂)⁻¹Ĉᵀ` and `Â = h² Ĉ Ĝ`, all dense.
#[derive(Debug, Clone)]
pub struct RomStepper<'a> {
    red: &'a ReducedSystem,
    h: f64,
    factor: Cholesky<f64, Dyn>,
    g: DMatrix<f64>,
    a: DMatrix<f64>,
}

impl<'a> RomStepper<'a> {
    pub fn new(red: &'a ReducedSystem, h: f64) -> Result<Self, MorError> {
        if !(h > 0.0) || !h.is_finite() {
            return Err(MorError::InvalidSize(format!("time step must be positive, got {h}")));
        }
        let s = &red.mhat + &red.khat * (h * h);
        let factor = dense_cholesky(&s)?;
        let g = factor.solve(&red.chat.transpose());
        let a = &red.chat * &g * (h * h);
        let a = (&a + a.transpose()) * 0.5;
        Ok(Self { red, h, factor, g, a })
    }

    pub fn system(&self) -> &ReducedSystem {
        self.red
    }

    pub fn step_with_load(&self, st: &SimState, fhat_next: &DVector<f64>) -> Result<SimState, LcpError> {
        let h2 = self.h * self.h;
        let rhs = fhat_next * h2 + &self.red.mhat * (&st.q_curr * 2.0 - &st.q_prev);
        let u = self.factor.solve(&rhs);
        let lambda = if self.red.n_constraints() == 0 {
            DVector::zeros(0)
        } else {
            let p = LcpProblem::new(self.a.clone(), &self.red.chat * &u + &self.red.b)?;
            solve_lcp(&p)?.lambda
        };
        let v_next = u + &self.g * &lambda * h2;
        Ok(SimState { t: st.t + self.h, q_curr: v_next, q_prev: st.q_curr.clone(), lambda })
    }
}

impl SteppingModel for RomStepper<'_> {
    fn dim(&self) -> usize {
        self.red.n_r()
    }

    fn n_constraints(&self) -> usize {
        self.red.n_constraints()
    }

    fn step_size(&self) -> f64 {
        self.h
    }

    fn step(&self, st: &SimState) -> Result<SimState, LcpError> {
        self.step_with_load(st, &self.red.load.at(st.t + self.h))
    }

    fn gap(&self, v: &DVector<f64>) -> DVector<f64> {
        self.red.gap(v)
    }

    fn energy(&self, v: &DVector<f64>, v_prev: &DVector<f64>) -> f64 {
        let vd = (v - v_prev) / self.h;
        0.5 * vd.dot(&(&self.red.mhat * &vd)) + 0.5 * v.dot(&(&self.red.khat * v))
    }

    fn sensor_values(&self, v: &DVector<f64>, sensors: &[SensorDofs]) -> Vec<[f64; 2]> {
        let q = &self.red.basis.q;
        let pick = |d: Option<usize>| d.map_or(0.0, |i| q.row(i).dot(&v.transpose()));
        sensors.iter().map(|s| [pick(s.ux), pick(s.uy)]).collect()
    }
}

/// One reduced step; factorizes on every call, use [`RomStepper`] to step
/// repeatedly.
pub fn rom_step(red: &ReducedSystem, st: &SimState, h: f64) -> Result<SimState, MorError> {
    let n = red.n_r();
    for v in [&st.q_curr, &st.q_prev] {
        if v.len() != n {
            return Err(MorError::DimensionMismatch { expected: n, found: v.len() });
        }
    }
    let stepper = RomStepper::new(red, h)?;
    stepper
        .step(st)
        .map_err(|source| MorError::Solver(crate::solver::SolverError::Lcp { step: 0, t: st.t + h, source }))
}

/// Reduced simulation recorded in full coordinates. `sys` supplies the
/// sensor DOF numbering; initial data in `p` are projected onto the basis.
pub fn simulate_rom(
    sys: &ContactSystem,
    red: &ReducedSystem,
    p: &SimParams,
    sensor_nodes: &[usize],
) -> Result<Trajectory, MorError> {
    if red.basis.n_full() != sys.n_free() {
        return Err(MorError::DimensionMismatch { expected: sys.n_free(), found: red.basis.n_full() });
    }
    p.validate()?;
    let sensors = resolve_sensors(sys, sensor_nodes)?;
    let stepper = RomStepper::new(red, p.h)?;
    let n = red.n_r();
    let lift = |v: &Option<DVector<f64>>| -> Result<DVector<f64>, MorError> {
        match v {
            None => Ok(DVector::zeros(n)),
            Some(q) if q.len() == sys.n_free() => Ok(red.project(q)),
            Some(q) => Err(MorError::DimensionMismatch { expected: sys.n_free(), found: q.len() }),
        }
    };
    let (v0, vd0) = (lift(&p.q0)?, lift(&p.v0)?);
    Ok(run_model(&stepper, p, &v0, &vd0, &sensors)?)
}

impl From<LcpError> for MorError {
    fn from(e: LcpError) -> Self {
        MorError::Solver(e.into())
    }
}
