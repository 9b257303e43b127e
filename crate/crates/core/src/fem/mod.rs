//! Finite-element model of a torn unit square: structured bilinear quads in
//! plane stress, double-node contact tears and Dirichlet elimination.

mod element;
mod load;
mod mesh;
mod system;

pub use element::{element_mass, element_stiffness, Material};
pub use load::{Load, LoadSpec, TimeProfile, LOAD1_AMPLITUDE, LOAD_OMEGA};
pub use mesh::{build_mesh, Axis, ContactPair, Edge, Mesh, MeshSpec, Rect, Side, TearSpec};
pub use system::{assemble, assemble_raw, ConstraintMatrix, ContactSystem, DofMap};

use crate::linalg::LinalgError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FemError {
    #[error("invalid tear: {0}")]
    InvalidTear(String),
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),
    #[error("invalid material: {0}")]
    InvalidMaterial(String),
    #[error("degenerate element (Jacobian determinant {det_j:e})")]
    DegenerateElement { det_j: f64 },
    #[error("element {element}: {source}")]
    AtElement { element: usize, source: Box<FemError> },
    #[error("no Dirichlet edge: the stiffness matrix would be singular")]
    EmptyDirichlet,
    #[error("no mesh node at ({x}, {y})")]
    NodeNotFound { x: f64, y: f64 },
    #[error("load acts on fixed node {node}")]
    LoadOnFixedNode { node: usize },
    #[error("invalid constraint: {0}")]
    InvalidConstraint(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

impl FemError {
    fn at_element(self, element: usize) -> Self {
        FemError::AtElement { element, source: Box::new(self) }
    }
}

/// Convenience: mesh, assemble and return both.
pub fn build_system(spec: &MeshSpec, mat: &Material, load: &LoadSpec) -> Result<(Mesh, ContactSystem), FemError> {
    let mesh = build_mesh(spec)?;
    let sys = assemble(&mesh, mat, spec, load)?;
    Ok((mesh, sys))
}
