use nalgebra::{DMatrix, DVector};

use super::{polish, LcpProblem, LcpSolution, LcpStatus};

/// Lemke's complementary pivoting method with covering vector `d = 1` and a
/// lexicographic ratio test.
///
/// The tableau holds `I w − A z − d z₀ = B`. Columns `0..m` are `w`, `m..2m`
/// are `z` (the multipliers λ), column `2m` is the artificial `z₀` and the
/// last column is the right-hand side. Because the initial basis is `w`, the
/// first `m` columns always carry the current basis inverse, which is what the
/// lexicographic tie-break compares.
#[derive(Debug, Clone, Copy)]
pub struct Lemke {
    /// Pivot limit as a multiple of the problem size.
    pub max_pivots_per_dim: usize,
    /// Relative threshold below which a column entry is not a pivot candidate.
    pub pivot_tol: f64,
}

impl Default for Lemke {
    fn default() -> Self {
        Self { max_pivots_per_dim: 50, pivot_tol: 1e-12 }
    }
}

pub fn lemke_solve(p: &LcpProblem) -> LcpSolution {
    Lemke::default().solve(p)
}

struct Tableau {
    m: usize,
    t: DMatrix<f64>,
    basis: Vec<usize>,
}

impl Tableau {
    fn new(p: &LcpProblem) -> Self {
        let m = p.dim();
        let mut t = DMatrix::zeros(m, 2 * m + 2);
        for i in 0..m {
            t[(i, i)] = 1.0;
            for j in 0..m {
                t[(i, m + j)] = -p.a()[(i, j)];
            }
            t[(i, 2 * m)] = -1.0;
            t[(i, 2 * m + 1)] = p.b()[i];
        }
        Self { m, t, basis: (0..m).collect() }
    }

    fn artificial(&self) -> usize {
        2 * self.m
    }

    fn rhs_col(&self) -> usize {
        2 * self.m + 1
    }

    fn complement(&self, var: usize) -> usize {
        if var < self.m {
            var + self.m
        } else {
            var - self.m
        }
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let piv = self.t[(row, col)];
        let ncols = self.t.ncols();
        for c in 0..ncols {
            self.t[(row, c)] /= piv;
        }
        for r in 0..self.m {
            if r == row {
                continue;
            }
            let f = self.t[(r, col)];
            if f != 0.0 {
                for c in 0..ncols {
                    let v = self.t[(row, c)];
                    self.t[(r, c)] -= f * v;
                }
                self.t[(r, col)] = 0.0;
            }
        }
        self.basis[row] = col;
    }

    /// Lexicographic minimum of `[rhs | B⁻¹]_i / divisor_i` over `rows`.
    fn lexmin(&self, rows: &[usize], divisor: impl Fn(usize) -> f64) -> usize {
        let rhs = self.rhs_col();
        let key = |r: usize, k: usize| {
            let c = if k == 0 { rhs } else { k - 1 };
            self.t[(r, c)] / divisor(r)
        };
        let mut cand: Vec<usize> = rows.to_vec();
        for k in 0..=self.m {
            let best = cand.iter().map(|&r| key(r, k)).fold(f64::INFINITY, f64::min);
            let tol = 1e-12 * best.abs().max(if k == 0 { 1e-300 } else { 1.0 });
            cand.retain(|&r| key(r, k) <= best + tol);
            if cand.len() == 1 {
                break;
            }
        }
        cand[0]
    }
}

impl Lemke {
    pub fn solve(&self, p: &LcpProblem) -> LcpSolution {
        let m = p.dim();
        if m == 0 || p.b().iter().all(|&v| v >= 0.0) {
            return LcpSolution {
                lambda: DVector::zeros(m),
                w: p.b().clone(),
                status: LcpStatus::Solved,
                iterations: 0,
            };
        }

        let mut tab = Tableau::new(p);
        let z0 = tab.artificial();
        let max_pivots = self.max_pivots_per_dim * m;

        // z₀ enters; the row with the (lexicographically) most negative B leaves
        let all: Vec<usize> = (0..m).collect();
        let first = tab.lexmin(&all, |_| 1.0);
        let mut leaving = tab.basis[first];
        tab.pivot(first, z0);
        let mut pivots = 1;

        let status = loop {
            let entering = tab.complement(leaving);
            if pivots >= max_pivots {
                break LcpStatus::IterationLimit;
            }
            let col_max = (0..m).map(|r| tab.t[(r, entering)].abs()).fold(0.0, f64::max);
            let tol = self.pivot_tol * col_max.max(f64::MIN_POSITIVE);
            let rows: Vec<usize> = (0..m).filter(|&r| tab.t[(r, entering)] > tol).collect();
            if rows.is_empty() {
                break LcpStatus::RayTermination;
            }
            let rhs = tab.rhs_col();
            let ratio = |r: usize| tab.t[(r, rhs)] / tab.t[(r, entering)];
            let best = rows.iter().map(|&r| ratio(r)).fold(f64::INFINITY, f64::min);
            let tol_ratio = 1e-12 * best.abs().max(1e-300);
            let ties: Vec<usize> = rows.iter().copied().filter(|&r| ratio(r) <= best + tol_ratio).collect();
            // let z₀ leave whenever it can: that ends the walk
            let row = match ties.iter().find(|&&r| tab.basis[r] == z0) {
                Some(&r) => r,
                None => tab.lexmin(&ties, |r| tab.t[(r, entering)]),
            };
            leaving = tab.basis[row];
            tab.pivot(row, entering);
            pivots += 1;
            if leaving == z0 {
                break LcpStatus::Solved;
            }
        };

        let rhs = tab.rhs_col();
        let mut lambda = DVector::zeros(m);
        let mut active = vec![false; m];
        for (r, &var) in tab.basis.iter().enumerate() {
            if (m..2 * m).contains(&var) {
                lambda[var - m] = tab.t[(r, rhs)];
                active[var - m] = true;
            }
        }
        let mut sol = LcpSolution { lambda, w: DVector::zeros(m), status, iterations: pivots };
        if status == LcpStatus::Solved {
            polish(p, &mut sol, &active);
        } else {
            sol.w = p.slack(&sol.lambda);
        }
        sol
    }
}
