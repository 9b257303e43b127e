#![allow(dead_code)]

use std::path::PathBuf;

use contact_mor::fem::{build_system, ContactSystem, LoadSpec, Material, Mesh, MeshSpec};
use nalgebra::{DMatrix, DVector};

pub fn material() -> Material {
    Material::new(1.0, 1000.0, 0.3).unwrap()
}

pub fn scenario_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(name)
}

pub fn system(spec: &MeshSpec, load: &LoadSpec) -> (Mesh, ContactSystem) {
    build_system(spec, &material(), load).unwrap()
}

/// 8×8 mesh with a 4-point tear on x = 0.75 hanging from the top edge.
pub fn torn_8x8() -> MeshSpec {
    MeshSpec::unit_square(8, 8).with_tear(vec![[0.75, 1.0], [0.75, 0.875], [0.75, 0.75], [0.75, 0.625]])
}

/// Minimizer of `½qᵀKq − qᵀf` subject to `Cq + b ≥ 0` by a primal-dual
/// active-set iteration on the dense KKT system. Returns `(q, λ)`.
pub fn qp_oracle(
    k: &DMatrix<f64>,
    f: &DVector<f64>,
    c: &DMatrix<f64>,
    b: &DVector<f64>,
) -> (DVector<f64>, DVector<f64>) {
    let (n, m) = (k.nrows(), c.nrows());
    let scale = k.diagonal().amax();
    let mut active = vec![false; m];
    for _ in 0..200 {
        let idx: Vec<usize> = (0..m).filter(|&i| active[i]).collect();
        let na = idx.len();
        let mut kkt = DMatrix::zeros(n + na, n + na);
        kkt.view_mut((0, 0), (n, n)).copy_from(k);
        let mut rhs = DVector::zeros(n + na);
        rhs.rows_mut(0, n).copy_from(f);
        for (r, &i) in idx.iter().enumerate() {
            for j in 0..n {
                kkt[(n + r, j)] = c[(i, j)];
                kkt[(j, n + r)] = -c[(i, j)];
            }
            rhs[n + r] = -b[i];
        }
        let sol = kkt.lu().solve(&rhs).expect("KKT system is nonsingular");
        let q = sol.rows(0, n).into_owned();
        let mut lambda = DVector::zeros(m);
        for (r, &i) in idx.iter().enumerate() {
            lambda[i] = sol[n + r];
        }
        let gap = c * &q + b;
        let next: Vec<bool> = (0..m).map(|i| lambda[i] - scale * gap[i] > 0.0).collect();
        if next == active {
            return (q, lambda);
        }
        active = next;
    }
    panic!("active-set oracle did not converge");
}

/// Relative error of the interior solution of a distorted-mesh patch test:
/// a linear displacement field prescribed on the boundary must be reproduced
/// exactly inside.
pub fn patch_test_error() -> f64 {
    use contact_mor::fem::{assemble_raw, build_mesh};
    let spec = MeshSpec::unit_square(4, 4);
    let mut mesh = build_mesh(&spec).unwrap();
    for (node, p) in mesh.nodes.iter_mut().enumerate() {
        let (i, j) = (node % 5, node / 5);
        if i > 0 && i < 4 && j > 0 && j < 4 {
            p[0] += 0.06 * ((3 * i + j) as f64).sin();
            p[1] += 0.06 * ((i + 5 * j) as f64).cos();
        }
    }
    let exact = |p: [f64; 2]| [0.1 + 0.2 * p[0] - 0.05 * p[1], -0.03 + 0.07 * p[0] + 0.15 * p[1]];
    let (_, k) = assemble_raw(&mesh, &material()).unwrap();
    let k = k.to_dense();
    let on_boundary = |node: usize| {
        let (i, j) = (node % 5, node / 5);
        i == 0 || j == 0 || i == 4 || j == 4
    };
    let inner: Vec<usize> = (0..k.nrows()).filter(|&d| !on_boundary(d / 2)).collect();
    let outer: Vec<usize> = (0..k.nrows()).filter(|&d| on_boundary(d / 2)).collect();
    let u_exact = DVector::from_fn(k.nrows(), |d, _| exact(mesh.nodes[d / 2])[d % 2]);
    let k_ii = DMatrix::from_fn(inner.len(), inner.len(), |r, c| k[(inner[r], inner[c])]);
    let k_ib = DMatrix::from_fn(inner.len(), outer.len(), |r, c| k[(inner[r], outer[c])]);
    let u_b = DVector::from_fn(outer.len(), |r, _| u_exact[outer[r]]);
    let u_i = k_ii.lu().solve(&(-(k_ib * u_b))).unwrap();
    let mut worst = 0.0f64;
    for (r, &d) in inner.iter().enumerate() {
        worst = worst.max((u_i[r] - u_exact[d]).abs());
    }
    worst / u_exact.amax()
}

/// Relative error of the assembled total mass `1ᵀM_x1` against `ρ·area`.
pub fn total_mass_error(spec: &MeshSpec) -> f64 {
    use contact_mor::fem::{assemble_raw, build_mesh};
    let mesh = build_mesh(spec).unwrap();
    let mat = material();
    let (m, _) = assemble_raw(&mesh, &mat).unwrap();
    let ones_x = DVector::from_fn(m.dim(), |d, _| if d % 2 == 0 { 1.0 } else { 0.0 });
    let exact = mat.rho * mat.thickness * spec.domain.area();
    (m.quad_form(&ones_x) - exact).abs() / exact
}

/// 10×10 mesh, tear on x = 0.7 from the top; a constant inward push at the
/// top right corner closes it.
pub fn closed_tear_10x10() -> (Mesh, ContactSystem) {
    let spec =
        MeshSpec::unit_square(10, 10).with_tear(vec![[0.7, 1.0], [0.7, 0.9], [0.7, 0.8], [0.7, 0.7], [0.7, 0.6]]);
    system(&spec, &LoadSpec::constant([1.0, 1.0], [-1.0, -0.5], 20.0))
}
