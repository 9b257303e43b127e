use std::collections::{BTreeMap, BTreeSet};
use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use super::FemError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl Default for Rect {
    fn default() -> Self {
        Self { x0: 0.0, y0: 0.0, x1: 1.0, y1: 1.0 }
    }
}

impl Rect {
    pub fn area(&self) -> f64 {
        (self.x1 - self.x0) * (self.y1 - self.y0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Edge {
    Left,
    Right,
    Bottom,
    Top,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
}

impl Axis {
    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
        }
    }
}

/// Which copy of a doubled tear vertex a coordinate refers to. `Minus` is the
/// original node (−x or −y side of the tear), `Plus` the duplicate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    #[default]
    Minus,
    Plus,
}

/// A contact tear: consecutive, collinear, axis-aligned grid vertices that
/// are split into double nodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TearSpec {
    pub points: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeshSpec {
    pub nx: usize,
    pub ny: usize,
    #[serde(default)]
    pub domain: Rect,
    #[serde(default)]
    pub tears: Vec<TearSpec>,
    #[serde(default = "default_dirichlet")]
    pub dirichlet_edges: Vec<Edge>,
}

fn default_dirichlet() -> Vec<Edge> {
    vec![Edge::Left]
}

impl MeshSpec {
    pub fn unit_square(nx: usize, ny: usize) -> Self {
        Self { nx, ny, domain: Rect::default(), tears: Vec::new(), dirichlet_edges: default_dirichlet() }
    }

    pub fn with_tear(mut self, points: Vec<[f64; 2]>) -> Self {
        self.tears.push(TearSpec { points });
        self
    }

    pub fn spacing(&self) -> (f64, f64) {
        ((self.domain.x1 - self.domain.x0) / self.nx as f64, (self.domain.y1 - self.domain.y0) / self.ny as f64)
    }

    /// Grid index `(i, j)` of a coordinate, if it lies on a grid vertex.
    pub fn grid_index(&self, p: [f64; 2]) -> Option<(usize, usize)> {
        let (hx, hy) = self.spacing();
        let fi = (p[0] - self.domain.x0) / hx;
        let fj = (p[1] - self.domain.y0) / hy;
        let (i, j) = (fi.round(), fj.round());
        let on_grid = (fi - i).abs() < 1e-9 && (fj - j).abs() < 1e-9;
        let inside = i >= 0.0 && j >= 0.0 && i <= self.nx as f64 && j <= self.ny as f64;
        (on_grid && inside).then_some((i as usize, j as usize))
    }

    /// Nearest grid vertex, accepted within half a grid spacing per axis.
    pub fn snap(&self, p: [f64; 2]) -> Option<(usize, usize)> {
        let (hx, hy) = self.spacing();
        let fi = (p[0] - self.domain.x0) / hx;
        let fj = (p[1] - self.domain.y0) / hy;
        let (i, j) = (fi.round(), fj.round());
        let close = (fi - i).abs() <= 0.5 && (fj - j).abs() <= 0.5;
        let inside = i >= 0.0 && j >= 0.0 && i <= self.nx as f64 && j <= self.ny as f64;
        (close && inside).then_some((i as usize, j as usize))
    }

    fn on_edge(&self, (i, j): (usize, usize), e: Edge) -> bool {
        match e {
            Edge::Left => i == 0,
            Edge::Right => i == self.nx,
            Edge::Bottom => j == 0,
            Edge::Top => j == self.ny,
        }
    }

    pub fn is_dirichlet_vertex(&self, ij: (usize, usize)) -> bool {
        self.dirichlet_edges.iter().any(|&e| self.on_edge(ij, e))
    }
}

/// One double-node pair: the gap is `(q_plus − q_minus)·n + b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ContactPair {
    /// Original node, on the negative side of the tear.
    pub minus: usize,
    /// Duplicate, used by the elements on the positive side.
    pub plus: usize,
    pub normal: Axis,
}

/// Structured quadrilateral mesh. Nodes `0..grid_nodes` are the grid vertices
/// in row-major order (`j * (nx + 1) + i`); tear duplicates follow.
#[derive(Debug, Clone)]
pub struct Mesh {
    pub nx: usize,
    pub ny: usize,
    pub nodes: Vec<[f64; 2]>,
    /// Counter-clockwise: bottom-left, bottom-right, top-right, top-left.
    pub elements: Vec<[usize; 4]>,
    pub contact_pairs: Vec<ContactPair>,
    pub grid_nodes: usize,
    /// Grid vertex a node sits on (duplicates map to their original vertex).
    pub node_grid: Vec<(usize, usize)>,
}

impl Mesh {
    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    /// Number of displacement DOFs before Dirichlet elimination.
    pub fn raw_dofs(&self) -> usize {
        2 * self.nodes.len()
    }

    pub fn grid_node(&self, i: usize, j: usize) -> usize {
        j * (self.nx + 1) + i
    }

    /// Duplicate of grid node `g`, if `g` is a tear vertex.
    pub fn duplicate_of(&self, g: usize) -> Option<usize> {
        self.contact_pairs.iter().find(|p| p.minus == g).map(|p| p.plus)
    }

    /// Node at grid vertex `(i, j)`, choosing the tear side for double nodes.
    pub fn node_at(&self, (i, j): (usize, usize), side: Side) -> usize {
        let g = self.grid_node(i, j);
        match side {
            Side::Minus => g,
            Side::Plus => self.duplicate_of(g).unwrap_or(g),
        }
    }

    /// Node order that keeps every duplicate next to its original, which
    /// keeps the envelope of the assembled matrices narrow.
    pub fn banded_node_order(&self) -> Vec<usize> {
        let mut order = Vec::with_capacity(self.num_nodes());
        let dup: BTreeMap<usize, usize> = self.contact_pairs.iter().map(|p| (p.minus, p.plus)).collect();
        for g in 0..self.grid_nodes {
            order.push(g);
            if let Some(&d) = dup.get(&g) {
                order.push(d);
            }
        }
        order
    }

    /// Plain-text export: node and element tables followed by contact pairs.
    pub fn write_text<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "nodes {}", self.nodes.len())?;
        for (k, p) in self.nodes.iter().enumerate() {
            writeln!(w, "{k} {:e} {:e}", p[0], p[1])?;
        }
        writeln!(w, "elements {}", self.elements.len())?;
        for (k, e) in self.elements.iter().enumerate() {
            writeln!(w, "{k} {} {} {} {}", e[0], e[1], e[2], e[3])?;
        }
        writeln!(w, "contact_pairs {}", self.contact_pairs.len())?;
        for (k, c) in self.contact_pairs.iter().enumerate() {
            let axis = match c.normal {
                Axis::X => "x",
                Axis::Y => "y",
            };
            writeln!(w, "{k} {} {} {axis}", c.minus, c.plus)?;
        }
        Ok(())
    }
}

struct ResolvedTear {
    normal: Axis,
    /// Grid line coordinate index (column for vertical tears, row for horizontal).
    line: usize,
    vertices: Vec<(usize, usize)>,
}

fn resolve_tear(spec: &MeshSpec, tear: &TearSpec, k: usize) -> Result<ResolvedTear, FemError> {
    let invalid = |msg: String| FemError::InvalidTear(format!("tear {k}: {msg}"));
    if tear.points.is_empty() {
        return Err(invalid("no points".into()));
    }
    let mut vertices = Vec::with_capacity(tear.points.len());
    for p in &tear.points {
        let ij =
            spec.grid_index(*p).ok_or_else(|| invalid(format!("point ({}, {}) is not a grid vertex", p[0], p[1])))?;
        if spec.is_dirichlet_vertex(ij) {
            return Err(invalid(format!("point ({}, {}) lies on a Dirichlet edge", p[0], p[1])));
        }
        vertices.push(ij);
    }
    let vertical = vertices.iter().all(|v| v.0 == vertices[0].0);
    let horizontal = vertices.iter().all(|v| v.1 == vertices[0].1);
    let (normal, line) = match (vertical, horizontal) {
        // a single point is taken as a vertical tear (x-normal)
        (true, _) => (Axis::X, vertices[0].0),
        (false, true) => (Axis::Y, vertices[0].1),
        (false, false) => return Err(invalid("points are not on one grid line".into())),
    };
    let along = |v: &(usize, usize)| if normal == Axis::X { v.1 } else { v.0 };
    for w in vertices.windows(2) {
        if along(&w[0]).abs_diff(along(&w[1])) != 1 {
            return Err(invalid("points are not consecutive grid vertices".into()));
        }
    }
    let (lo, hi) = if normal == Axis::X { (0, spec.nx) } else { (0, spec.ny) };
    if line == lo || line == hi {
        return Err(invalid("tear lies on the domain boundary".into()));
    }
    Ok(ResolvedTear { normal, line, vertices })
}

pub fn build_mesh(spec: &MeshSpec) -> Result<Mesh, FemError> {
    if spec.nx == 0 || spec.ny == 0 {
        return Err(FemError::InvalidMesh("element counts must be positive".into()));
    }
    let d = spec.domain;
    if !(d.x1 > d.x0 && d.y1 > d.y0) {
        return Err(FemError::InvalidMesh("domain rectangle is empty".into()));
    }
    let (hx, hy) = spec.spacing();
    let nxv = spec.nx + 1;
    let mut nodes = Vec::with_capacity(nxv * (spec.ny + 1));
    let mut node_grid = Vec::with_capacity(nodes.capacity());
    for j in 0..=spec.ny {
        for i in 0..=spec.nx {
            nodes.push([d.x0 + i as f64 * hx, d.y0 + j as f64 * hy]);
            node_grid.push((i, j));
        }
    }
    let grid_nodes = nodes.len();

    let tears: Vec<ResolvedTear> =
        spec.tears.iter().enumerate().map(|(k, t)| resolve_tear(spec, t, k)).collect::<Result<_, _>>()?;

    // duplicate per (vertex): (duplicate node, normal, tear line)
    let mut dup: BTreeMap<(usize, usize), (usize, Axis, usize)> = BTreeMap::new();
    let mut contact_pairs = Vec::new();
    for (k, t) in tears.iter().enumerate() {
        for &(i, j) in &t.vertices {
            let g = j * nxv + i;
            if dup.contains_key(&(i, j)) {
                return Err(FemError::InvalidTear(format!("tear {k}: vertex ({i}, {j}) already belongs to a tear")));
            }
            let id = nodes.len();
            nodes.push(nodes[g]);
            node_grid.push((i, j));
            dup.insert((i, j), (id, t.normal, t.line));
            contact_pairs.push(ContactPair { minus: g, plus: id, normal: t.normal });
        }
    }

    let mut elements = Vec::with_capacity(spec.nx * spec.ny);
    for ej in 0..spec.ny {
        for ei in 0..spec.nx {
            let corners = [(ei, ej), (ei + 1, ej), (ei + 1, ej + 1), (ei, ej + 1)];
            let mut conn = [0usize; 4];
            for (c, &(i, j)) in corners.iter().enumerate() {
                conn[c] = j * nxv + i;
                if let Some(&(id, normal, line)) = dup.get(&(i, j)) {
                    let plus_side = match normal {
                        Axis::X => ei == line,
                        Axis::Y => ej == line,
                    };
                    if plus_side {
                        conn[c] = id;
                    }
                }
            }
            elements.push(conn);
        }
    }

    // every tear must leave both sides distinguishable
    let used: BTreeSet<usize> = elements.iter().flatten().copied().collect();
    if let Some(p) = contact_pairs.iter().find(|p| !used.contains(&p.plus) || !used.contains(&p.minus)) {
        return Err(FemError::InvalidTear(format!("double node {} is not referenced by an element", p.plus)));
    }

    Ok(Mesh { nx: spec.nx, ny: spec.ny, nodes, elements, contact_pairs, grid_nodes, node_grid })
}
