//! Bilinear quadrilateral in plane stress, integrated with 2×2 Gauss points.
//!
//! Local DOF order is `[u1x, u1y, u2x, u2y, u3x, u3y, u4x, u4y]` with the
//! nodes counter-clockwise.

use nalgebra::{DMatrix, Matrix2, Matrix3, SMatrix};
use serde::{Deserialize, Serialize};

use super::FemError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Material {
    pub rho: f64,
    #[serde(rename = "E")]
    pub youngs_modulus: f64,
    #[serde(rename = "nu")]
    pub poisson_ratio: f64,
    #[serde(default = "unit")]
    pub thickness: f64,
}

fn unit() -> f64 {
    1.0
}

impl Material {
    pub fn new(rho: f64, youngs_modulus: f64, poisson_ratio: f64) -> Result<Self, FemError> {
        let m = Self { rho, youngs_modulus, poisson_ratio, thickness: 1.0 };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<(), FemError> {
        if !(self.youngs_modulus > 0.0) {
            return Err(FemError::InvalidMaterial(format!("E must be positive, got {}", self.youngs_modulus)));
        }
        if !(self.poisson_ratio > -1.0 && self.poisson_ratio < 0.5) {
            return Err(FemError::InvalidMaterial(format!("nu must lie in (-1, 0.5), got {}", self.poisson_ratio)));
        }
        if !(self.rho > 0.0) {
            return Err(FemError::InvalidMaterial(format!("rho must be positive, got {}", self.rho)));
        }
        if !(self.thickness > 0.0) {
            return Err(FemError::InvalidMaterial(format!("thickness must be positive, got {}", self.thickness)));
        }
        Ok(())
    }

    /// Plane-stress constitutive matrix in Voigt form `[εxx, εyy, γxy]`.
    pub fn plane_stress(&self) -> Matrix3<f64> {
        let (e, nu) = (self.youngs_modulus, self.poisson_ratio);
        let c = e / (1.0 - nu * nu);
        Matrix3::new(c, c * nu, 0.0, c * nu, c, 0.0, 0.0, 0.0, c * (1.0 - nu) / 2.0)
    }
}

const GAUSS: [f64; 2] = [-0.577_350_269_189_625_8, 0.577_350_269_189_625_8];
const CORNERS: [(f64, f64); 4] = [(-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0)];

fn shape(xi: f64, eta: f64) -> [f64; 4] {
    CORNERS.map(|(a, b)| 0.25 * (1.0 + a * xi) * (1.0 + b * eta))
}

/// Derivatives with respect to `(ξ, η)`, one row per shape function.
fn shape_grad(xi: f64, eta: f64) -> [[f64; 2]; 4] {
    CORNERS.map(|(a, b)| [0.25 * a * (1.0 + b * eta), 0.25 * b * (1.0 + a * xi)])
}

struct QuadPoint {
    n: [f64; 4],
    /// Physical gradients of the shape functions.
    dn: [[f64; 2]; 4],
    det_j: f64,
}

fn quad_points(coords: &[[f64; 2]; 4]) -> Result<Vec<QuadPoint>, FemError> {
    let mut pts = Vec::with_capacity(4);
    for &eta in &GAUSS {
        for &xi in &GAUSS {
            let g = shape_grad(xi, eta);
            let mut jac = Matrix2::zeros();
            for a in 0..4 {
                for r in 0..2 {
                    for c in 0..2 {
                        jac[(r, c)] += g[a][r] * coords[a][c];
                    }
                }
            }
            let det_j = jac.determinant();
            if !(det_j > 0.0) {
                return Err(FemError::DegenerateElement { det_j });
            }
            let inv = jac.try_inverse().ok_or(FemError::DegenerateElement { det_j })?;
            let dn = g.map(|gr| [inv[(0, 0)] * gr[0] + inv[(0, 1)] * gr[1], inv[(1, 0)] * gr[0] + inv[(1, 1)] * gr[1]]);
            pts.push(QuadPoint { n: shape(xi, eta), dn, det_j });
        }
    }
    Ok(pts)
}

pub fn element_stiffness(coords: &[[f64; 2]; 4], mat: &Material) -> Result<DMatrix<f64>, FemError> {
    let d = mat.plane_stress();
    let mut k = SMatrix::<f64, 8, 8>::zeros();
    for qp in quad_points(coords)? {
        let mut b = SMatrix::<f64, 3, 8>::zeros();
        for a in 0..4 {
            b[(0, 2 * a)] = qp.dn[a][0];
            b[(1, 2 * a + 1)] = qp.dn[a][1];
            b[(2, 2 * a)] = qp.dn[a][1];
            b[(2, 2 * a + 1)] = qp.dn[a][0];
        }
        k += b.transpose() * d * b * (qp.det_j * mat.thickness);
    }
    // exact symmetry regardless of summation order
    let k = (k + k.transpose()) * 0.5;
    Ok(DMatrix::from_column_slice(8, 8, k.as_slice()))
}

/// Consistent mass matrix.
pub fn element_mass(coords: &[[f64; 2]; 4], mat: &Material) -> Result<DMatrix<f64>, FemError> {
    let mut m = DMatrix::zeros(8, 8);
    for qp in quad_points(coords)? {
        let w = mat.rho * mat.thickness * qp.det_j;
        for a in 0..4 {
            for b in 0..4 {
                let v = w * qp.n[a] * qp.n[b];
                m[(2 * a, 2 * b)] += v;
                m[(2 * a + 1, 2 * b + 1)] += v;
            }
        }
    }
    Ok(m)
}
