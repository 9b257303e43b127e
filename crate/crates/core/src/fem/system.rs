use nalgebra::{DMatrix, DVector};

use super::element::{element_mass, element_stiffness, Material};
use super::load::{Load, LoadSpec};
use super::mesh::{Axis, ContactPair, Mesh, MeshSpec};
use super::FemError;
use crate::linalg::SparseSymMatrix;

/// Sparse `m × n` constraint matrix of node-to-node contact: every row holds
/// `+1` on the normal DOF of the duplicate node and `−1` on the original.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintMatrix {
    ncols: usize,
    rows: Vec<Vec<(usize, f64)>>,
}

impl ConstraintMatrix {
    pub fn new(ncols: usize, rows: Vec<Vec<(usize, f64)>>) -> Result<Self, FemError> {
        for (r, row) in rows.iter().enumerate() {
            if row.is_empty() {
                return Err(FemError::InvalidConstraint(format!("row {r} is empty")));
            }
            if let Some(&(c, _)) = row.iter().find(|e| e.0 >= ncols) {
                return Err(FemError::InvalidConstraint(format!("row {r} references column {c} of {ncols}")));
            }
        }
        Ok(Self { ncols, rows })
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn row(&self, r: usize) -> &[(usize, f64)] {
        &self.rows[r]
    }

    pub fn mul_vec(&self, q: &DVector<f64>) -> DVector<f64> {
        DVector::from_iterator(self.rows.len(), self.rows.iter().map(|row| row.iter().map(|&(c, v)| v * q[c]).sum()))
    }

    /// `Cᵀ λ`.
    pub fn tr_mul_vec(&self, lambda: &DVector<f64>) -> DVector<f64> {
        let mut out = DVector::zeros(self.ncols);
        for (r, row) in self.rows.iter().enumerate() {
            for &(c, v) in row {
                out[c] += v * lambda[r];
            }
        }
        out
    }

    /// `C X` for a dense `X`.
    pub fn mul_dense(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        let mut out = DMatrix::zeros(self.rows.len(), x.ncols());
        for (r, row) in self.rows.iter().enumerate() {
            for &(c, v) in row {
                for k in 0..x.ncols() {
                    out[(r, k)] += v * x[(c, k)];
                }
            }
        }
        out
    }

    /// Dense `Cᵀ` (`n × m`).
    pub fn transpose_dense(&self) -> DMatrix<f64> {
        let mut out = DMatrix::zeros(self.ncols, self.rows.len());
        for (r, row) in self.rows.iter().enumerate() {
            for &(c, v) in row {
                out[(c, r)] += v;
            }
        }
        out
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        self.transpose_dense().transpose()
    }

    /// Sorted set of columns with a nonzero coefficient.
    pub fn support(&self) -> Vec<usize> {
        let mut cols: Vec<usize> = self.rows.iter().flatten().filter(|e| e.1 != 0.0).map(|e| e.0).collect();
        cols.sort_unstable();
        cols.dedup();
        cols
    }
}

/// Mapping between mesh nodes and free DOF indices.
#[derive(Debug, Clone, PartialEq)]
pub struct DofMap {
    /// `node_dofs[node][axis]`, `None` for Dirichlet-fixed DOFs.
    node_dofs: Vec<[Option<usize>; 2]>,
    /// `(node, axis)` of every free DOF.
    free: Vec<(usize, Axis)>,
}

impl DofMap {
    /// One free DOF per abstract "node", on the x axis; for systems that do
    /// not come from a mesh.
    pub fn scalar(n: usize) -> Self {
        Self { node_dofs: (0..n).map(|i| [Some(i), None]).collect(), free: (0..n).map(|i| (i, Axis::X)).collect() }
    }

    pub fn dof(&self, node: usize, axis: Axis) -> Option<usize> {
        self.node_dofs.get(node).and_then(|d| d[axis.index()])
    }

    pub fn node_count(&self) -> usize {
        self.node_dofs.len()
    }

    pub fn free_count(&self) -> usize {
        self.free.len()
    }

    pub fn free_dof(&self, k: usize) -> (usize, Axis) {
        self.free[k]
    }

    /// Free DOFs of `node` (both axes, those that are not fixed).
    pub fn node_free_dofs(&self, node: usize) -> impl Iterator<Item = usize> + '_ {
        self.node_dofs[node].iter().flatten().copied()
    }
}

/// Semi-discrete contact model
///
/// ```text
/// M q̈ + K q = f(t) + Cᵀλ,   Cq + b ≥ 0,   λ ≥ 0,   λᵀ(Cq + b) = 0
/// ```
///
/// over the free (non-Dirichlet) DOFs.
#[derive(Debug, Clone)]
pub struct ContactSystem {
    pub m: SparseSymMatrix,
    pub k: SparseSymMatrix,
    pub c: ConstraintMatrix,
    pub b: DVector<f64>,
    pub load: Load,
    pub dof_map: DofMap,
    pub contact_pairs: Vec<ContactPair>,
    /// DOF count before Dirichlet elimination.
    pub raw_dofs: usize,
}

impl ContactSystem {
    /// System from raw parts (no mesh). Checks dimensions and `b ≥ 0`.
    pub fn from_parts(
        m: SparseSymMatrix,
        k: SparseSymMatrix,
        c: ConstraintMatrix,
        b: DVector<f64>,
        load: Load,
    ) -> Result<Self, FemError> {
        let n = m.dim();
        if k.dim() != n || c.ncols() != n || load.pattern.len() != n || b.len() != c.nrows() {
            return Err(FemError::InvalidConstraint("system parts have inconsistent dimensions".into()));
        }
        if b.iter().any(|&v| !(v >= 0.0)) {
            return Err(FemError::InvalidConstraint("clearance vector must be non-negative".into()));
        }
        Ok(Self { m, k, c, b, load, dof_map: DofMap::scalar(n), contact_pairs: Vec::new(), raw_dofs: n })
    }

    pub fn n_free(&self) -> usize {
        self.m.dim()
    }

    pub fn n_constraints(&self) -> usize {
        self.c.nrows()
    }

    pub fn gap(&self, q: &DVector<f64>) -> DVector<f64> {
        self.c.mul_vec(q) + &self.b
    }

    /// Same system under a different load.
    pub fn with_load(&self, load: Load) -> Self {
        Self { load, ..self.clone() }
    }

    /// Free DOFs belonging to contact nodes (both nodes of every pair, both
    /// axes): `4m` entries for `m` pairs.
    pub fn contact_node_dofs(&self) -> Vec<usize> {
        let mut dofs: Vec<usize> = self
            .contact_pairs
            .iter()
            .flat_map(|p| [p.minus, p.plus])
            .flat_map(|node| self.dof_map.node_free_dofs(node).collect::<Vec<_>>())
            .collect();
        dofs.sort_unstable();
        dofs.dedup();
        dofs
    }
}

/// Global `M` and `K` over all `2 · nodes` raw DOFs (`2 * node + axis`), with
/// no boundary conditions applied.
pub fn assemble_raw(mesh: &Mesh, mat: &Material) -> Result<(SparseSymMatrix, SparseSymMatrix), FemError> {
    mat.validate()?;
    let n = mesh.raw_dofs();
    let map: Vec<Option<usize>> = (0..n).map(Some).collect();
    assemble_with(mesh, mat, &map, n)
}

fn assemble_with(
    mesh: &Mesh,
    mat: &Material,
    dof_of_raw: &[Option<usize>],
    n: usize,
) -> Result<(SparseSymMatrix, SparseSymMatrix), FemError> {
    let mut mt = Vec::with_capacity(mesh.elements.len() * 36);
    let mut kt = Vec::with_capacity(mesh.elements.len() * 36);
    for (e, conn) in mesh.elements.iter().enumerate() {
        let coords = conn.map(|nd| mesh.nodes[nd]);
        let ke = element_stiffness(&coords, mat).map_err(|err| err.at_element(e))?;
        let me = element_mass(&coords, mat).map_err(|err| err.at_element(e))?;
        let dofs: [Option<usize>; 8] = std::array::from_fn(|l| dof_of_raw[2 * conn[l / 2] + l % 2]);
        for a in 0..8 {
            let Some(ga) = dofs[a] else { continue };
            for b in a..8 {
                let Some(gb) = dofs[b] else { continue };
                kt.push((ga, gb, ke[(a, b)]));
                mt.push((ga, gb, me[(a, b)]));
            }
        }
    }
    Ok((SparseSymMatrix::from_triplets(n, mt)?, SparseSymMatrix::from_triplets(n, kt)?))
}

/// Assembles the contact system over the free DOFs.
pub fn assemble(mesh: &Mesh, mat: &Material, spec: &MeshSpec, load: &LoadSpec) -> Result<ContactSystem, FemError> {
    mat.validate()?;
    if spec.dirichlet_edges.is_empty() {
        return Err(FemError::EmptyDirichlet);
    }

    let mut node_dofs = vec![[None, None]; mesh.num_nodes()];
    let mut free = Vec::new();
    for node in mesh.banded_node_order() {
        if spec.is_dirichlet_vertex(mesh.node_grid[node]) {
            continue;
        }
        for axis in [Axis::X, Axis::Y] {
            node_dofs[node][axis.index()] = Some(free.len());
            free.push((node, axis));
        }
    }
    let dof_map = DofMap { node_dofs, free };
    let n = dof_map.free_count();
    let dof_of_raw: Vec<Option<usize>> = (0..mesh.raw_dofs()).map(|r| dof_map.node_dofs[r / 2][r % 2]).collect();
    let (m, k) = assemble_with(mesh, mat, &dof_of_raw, n)?;

    let mut rows = Vec::with_capacity(mesh.contact_pairs.len());
    let mut b = DVector::zeros(mesh.contact_pairs.len());
    for (r, p) in mesh.contact_pairs.iter().enumerate() {
        let (Some(plus), Some(minus)) = (dof_map.dof(p.plus, p.normal), dof_map.dof(p.minus, p.normal)) else {
            return Err(FemError::InvalidTear(format!("contact pair {r} touches a fixed DOF")));
        };
        rows.push(vec![(plus, 1.0), (minus, -1.0)]);
        let ax = p.normal.index();
        b[r] = mesh.nodes[p.plus][ax] - mesh.nodes[p.minus][ax];
    }
    let c = ConstraintMatrix::new(n, rows)?;

    let load = load_vector(mesh, spec, mat, &dof_map, load)?;
    Ok(ContactSystem {
        m,
        k,
        c,
        b,
        load,
        dof_map,
        contact_pairs: mesh.contact_pairs.clone(),
        raw_dofs: mesh.raw_dofs(),
    })
}

/// Spatial load pattern at unit amplitude over the free DOFs.
fn load_vector(mesh: &Mesh, spec: &MeshSpec, mat: &Material, dofs: &DofMap, load: &LoadSpec) -> Result<Load, FemError> {
    let ij =
        spec.grid_index(load.position).ok_or(FemError::NodeNotFound { x: load.position[0], y: load.position[1] })?;
    let node = mesh.node_at(ij, load.side);
    let mut pattern = DVector::zeros(dofs.free_count());
    for axis in [Axis::X, Axis::Y] {
        let v = load.direction[axis.index()];
        if v == 0.0 {
            continue;
        }
        let d = dofs.dof(node, axis).ok_or(FemError::LoadOnFixedNode { node })?;
        pattern[d] += v;
    }
    if load.body_force != [0.0, 0.0] {
        // consistent nodal forces ∫ Nᵀ F: the x block of the mass matrix
        // with unit density applied to a constant field
        let unit = Material { rho: 1.0, ..*mat };
        for conn in &mesh.elements {
            let coords = conn.map(|nd| mesh.nodes[nd]);
            let me = element_mass(&coords, &unit)?;
            for a in 0..4 {
                let share: f64 = (0..4).map(|b| me[(2 * a, 2 * b)]).sum();
                for axis in [Axis::X, Axis::Y] {
                    if let Some(d) = dofs.dof(conn[a], axis) {
                        pattern[d] += share * load.body_force[axis.index()];
                    }
                }
            }
        }
    }
    Ok(Load { pattern, profile: load.profile })
}
