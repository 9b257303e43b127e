use nalgebra::DVector;

use super::{solve_on_active_set, LcpError, LcpProblem, LcpSolution, LcpStatus, EPS_C};

pub const MAX_BRUTE_FORCE_DIM: usize = 20;

/// Tries every active set `S`, solving `A_SS λ_S = −B_S` with `λ = 0` off `S`,
/// and returns the first one that is feasible within [`EPS_C`].
///
/// Subsets are visited in ascending bitmask order (bit `i` set means index
/// `i` is active), so the empty set comes first.
pub fn brute_force_solve(p: &LcpProblem) -> Result<LcpSolution, LcpError> {
    let m = p.dim();
    if m > MAX_BRUTE_FORCE_DIM {
        return Err(LcpError::TooLarge(m));
    }
    let mut active = vec![false; m];
    for mask in 0u32..(1u32 << m) {
        for (i, a) in active.iter_mut().enumerate() {
            *a = mask & (1 << i) != 0;
        }
        if let Some(lambda) = solve_on_active_set(p, &active, EPS_C) {
            let w = p.slack(&lambda);
            return Ok(LcpSolution { lambda, w, status: LcpStatus::Solved, iterations: mask as usize + 1 });
        }
    }
    Ok(LcpSolution {
        lambda: DVector::zeros(m),
        w: p.b().clone(),
        status: LcpStatus::Infeasible,
        iterations: 1usize << m,
    })
}

/// Active set of a solution as a bitmask (λᵢ > 0).
#[cfg(test)]
fn support(sol: &LcpSolution) -> u32 {
    sol.lambda.iter().enumerate().filter(|(_, &v)| v > 0.0).map(|(i, _)| 1u32 << i).sum()
}
