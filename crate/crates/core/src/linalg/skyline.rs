use nalgebra::{DMatrix, DVector};

use super::{LinalgError, SparseSymMatrix};

/// Relative pivot floor: a pivot below `PIVOT_FLOOR * A[i,i]` is treated as a
/// loss of definiteness (e.g. an unconstrained rigid-body mode).
const PIVOT_FLOOR: f64 = 1e-12;

/// Envelope (skyline) Cholesky factor `A = L Lᵀ` of a sparse SPD matrix.
///
/// Row `i` of `L` is stored densely from the first nonzero column of row `i`
/// of `A` up to the diagonal; fill-in never leaves that envelope. Node
/// numberings that keep neighbours close (the mesh module orders free DOFs
/// that way) keep the envelope narrow.
#[derive(Debug, Clone)]
pub struct SpdFactorization {
    dim: usize,
    first: Vec<usize>,
    start: Vec<usize>,
    data: Vec<f64>,
}

impl SpdFactorization {
    pub fn new(a: &SparseSymMatrix) -> Result<Self, LinalgError> {
        let n = a.dim();
        let first: Vec<usize> = (0..n).map(|i| a.first_col(i)).collect();
        let mut start = Vec::with_capacity(n + 1);
        start.push(0);
        for i in 0..n {
            start.push(start[i] + (i - first[i] + 1));
        }
        let mut data = vec![0.0; start[n]];
        for i in 0..n {
            for (j, v) in a.row(i) {
                if j <= i {
                    data[start[i] + j - first[i]] = v;
                }
            }
        }

        for i in 0..n {
            let fi = first[i];
            for j in fi..=i {
                let fj = first[j];
                let lo = fi.max(fj);
                let mut s = data[start[i] + j - fi];
                let ri = start[i] + lo - fi;
                let rj = start[j] + lo - fj;
                for k in 0..(j - lo) {
                    s -= data[ri + k] * data[rj + k];
                }
                if j < i {
                    data[start[i] + j - fi] = s / data[start[j] + j - fj];
                } else {
                    let aii = a.get(i, i);
                    if !(s > PIVOT_FLOOR * aii.abs()) || !s.is_finite() {
                        return Err(LinalgError::NotPositiveDefinite { row: i, pivot: s });
                    }
                    data[start[i] + i - fi] = s.sqrt();
                }
            }
        }
        Ok(Self { dim: n, first, start, data })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Stored entries of the factor, a proxy for memory and solve cost.
    pub fn envelope_size(&self) -> usize {
        self.data.len()
    }

    pub fn solve(&self, rhs: &DVector<f64>) -> DVector<f64> {
        assert_eq!(rhs.len(), self.dim, "dimension mismatch in factorized solve");
        let mut x = rhs.clone();
        self.solve_in_place(x.as_mut_slice());
        x
    }

    /// Solves for every column of `rhs`.
    pub fn solve_many(&self, rhs: &DMatrix<f64>) -> DMatrix<f64> {
        assert_eq!(rhs.nrows(), self.dim, "dimension mismatch in factorized solve");
        let mut x = rhs.clone();
        for mut col in x.column_iter_mut() {
            self.solve_in_place(col.as_mut_slice());
        }
        x
    }

    fn solve_in_place(&self, x: &mut [f64]) {
        let n = self.dim;
        // L y = b
        for i in 0..n {
            let fi = self.first[i];
            let row = &self.data[self.start[i]..self.start[i + 1]];
            let mut s = x[i];
            for (k, l) in row[..i - fi].iter().enumerate() {
                s -= l * x[fi + k];
            }
            x[i] = s / row[i - fi];
        }
        // Lᵀ x = y, column sweep over the rows of L
        for i in (0..n).rev() {
            let fi = self.first[i];
            let row = &self.data[self.start[i]..self.start[i + 1]];
            x[i] /= row[i - fi];
            let xi = x[i];
            for (k, l) in row[..i - fi].iter().enumerate() {
                x[fi + k] -= l * xi;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    use crate::linalg::EPS_LIN;

    #[test]
    fn identity_solve() {
        let f = SpdFactorization::new(&SparseSymMatrix::identity(3)).unwrap();
        let e1 = DVector::from_vec(vec![1.0, 0.0, 0.0]);
        assert_eq!(f.solve(&e1), e1);
    }

    #[test]
    fn diagonal_solve() {
        let a = SparseSymMatrix::from_triplets(2, [(0, 0, 2.0), (1, 1, 4.0)]).unwrap();
        let f = SpdFactorization::new(&a).unwrap();
        let x = f.solve(&DVector::from_vec(vec![2.0, 4.0]));
        assert!((x - DVector::from_vec(vec![1.0, 1.0])).amax() < 1e-15);
    }

    #[test]
    fn random_dense_spd_residual() {
        let mut rng = StdRng::seed_from_u64(7);
        let g = DMatrix::from_fn(20, 20, |_, _| rng.gen_range(-1.0..1.0));
        let a = g.transpose() * &g + DMatrix::identity(20, 20);
        let sa = SparseSymMatrix::from_dense(&a).unwrap();
        let f = SpdFactorization::new(&sa).unwrap();
        let r = DVector::from_fn(20, |_, _| rng.gen_range(-1.0..1.0));
        let x = f.solve(&r);
        assert!((&a * &x - &r).norm() <= EPS_LIN * r.norm());
    }

    #[test]
    fn singular_matrix_rejected() {
        // graph Laplacian of a path: constant vector in the nullspace
        let a = SparseSymMatrix::from_triplets(3, [(0, 0, 1.0), (0, 1, -1.0), (1, 1, 2.0), (1, 2, -1.0), (2, 2, 1.0)])
            .unwrap();
        assert!(matches!(SpdFactorization::new(&a), Err(LinalgError::NotPositiveDefinite { .. })));
        let neg = SparseSymMatrix::from_triplets(1, [(0, 0, -1.0)]).unwrap();
        assert!(SpdFactorization::new(&neg).is_err());
    }

    #[test]
    fn envelope_with_late_coupling() {
        // last row couples back to row 0, so its envelope spans the full width
        let n = 6;
        let mut t: Vec<(usize, usize, f64)> = (0..n).map(|i| (i, i, 4.0)).collect();
        t.extend((0..n - 1).map(|i| (i, i + 1, -1.0)));
        t.push((0, n - 1, -1.0));
        let a = SparseSymMatrix::from_triplets(n, t).unwrap();
        let f = SpdFactorization::new(&a).unwrap();
        let b = DVector::from_fn(n, |i, _| (i as f64).sin());
        let x = f.solve(&b);
        assert!((a.mul_vec(&x) - &b).norm() <= EPS_LIN * b.norm());
        let many = f.solve_many(&DMatrix::from_columns(&[b.clone(), b.clone() * 2.0]));
        assert!((many.column(1) - &x * 2.0).amax() < 1e-14);
    }

    proptest! {
        #[test]
        fn solve_is_left_inverse(seed in 0u64..1000, n in 1usize..15) {
            let mut rng = StdRng::seed_from_u64(seed);
            // banded SPD matrix: diagonally dominant with random couplings
            let mut t = Vec::new();
            for i in 0..n {
                for j in i + 1..(i + 3).min(n) {
                    t.push((i, j, rng.gen_range(-1.0..1.0)));
                }
                t.push((i, i, 5.0 + rng.gen_range(0.0..1.0)));
            }
            let a = SparseSymMatrix::from_triplets(n, t).unwrap();
            let f = SpdFactorization::new(&a).unwrap();
            let r = DVector::from_fn(n, |_, _| rng.gen_range(-1.0..1.0));
            let x = f.solve(&r);
            prop_assert!((a.mul_vec(&x) - &r).norm() <= EPS_LIN * r.norm().max(1e-300));
        }
    }
}
