use std::path::Path;

use serde::{Deserialize, Serialize};

use super::ScenarioError;
use crate::fem::{Edge, LoadSpec, Material, MeshSpec, Rect, Side, TearSpec};
use crate::solver::SimParams;

/// A complete run description, read from a TOML scenario file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default)]
    pub name: String,
    pub mesh: MeshSection,
    pub material: Material,
    pub load: LoadSection,
    #[serde(default)]
    pub sim: SimParams,
    pub sensors: Vec<SensorSpec>,
    #[serde(default)]
    pub reduction: Reduction,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshSection {
    pub nx: usize,
    pub ny: usize,
    #[serde(default)]
    pub domain: Rect,
    #[serde(default = "default_dirichlet")]
    pub dirichlet_edges: Vec<Edge>,
    #[serde(default)]
    pub tears: Vec<TearEntry>,
}

fn default_dirichlet() -> Vec<Edge> {
    vec![Edge::Left]
}

/// A tear given point by point, or as a segment covering every grid vertex
/// from `from` to `to`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TearEntry {
    Points { points: Vec<[f64; 2]> },
    Segment { from: [f64; 2], to: [f64; 2] },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum LoadSection {
    /// `(1.5 sin(0.1πt), 0)`
    Load1 {
        position: [f64; 2],
        #[serde(default)]
        side: Side,
    },
    /// Both components `1.5 sin(0.1πt) sin(π/4)`.
    Load2 {
        position: [f64; 2],
        #[serde(default)]
        side: Side,
    },
    /// `direction · amplitude · sin(omega t)`
    Custom {
        position: [f64; 2],
        #[serde(default)]
        side: Side,
        direction: [f64; 2],
        amplitude: f64,
        omega: f64,
    },
    Constant {
        position: [f64; 2],
        #[serde(default)]
        side: Side,
        direction: [f64; 2],
        amplitude: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SensorSpec {
    /// Snapped to the nearest mesh vertex within half a grid spacing.
    pub position: [f64; 2],
    #[serde(default)]
    pub side: Side,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case", deny_unknown_fields)]
pub enum Reduction {
    #[default]
    None,
    Krylov {
        n_r: usize,
    },
    Modal {
        n_r: usize,
    },
    CraigBampton {
        n_k: usize,
    },
}

impl Reduction {
    pub fn label(&self) -> &'static str {
        match self {
            Reduction::None => "none",
            Reduction::Krylov { .. } => "krylov",
            Reduction::Modal { .. } => "modal",
            Reduction::CraigBampton { .. } => "craig_bampton",
        }
    }
}

/// Command-line overrides applied on top of a scenario file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub method: Option<String>,
    pub n_r: Option<usize>,
    pub n_k: Option<usize>,
    pub h: Option<f64>,
    pub t_end: Option<f64>,
}

impl Scenario {
    pub fn from_toml(text: &str) -> Result<Self, ScenarioError> {
        let s: Scenario =
            toml::from_str(text).map_err(|e| ScenarioError::Config(e.to_string().trim_end().to_string()))?;
        s.validate()?;
        Ok(s)
    }

    /// Reads a scenario file; an empty `name` defaults to the file stem.
    pub fn from_file(path: &Path) -> Result<Self, ScenarioError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ScenarioError::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut s = Self::from_toml(&text).map_err(|e| match e {
            ScenarioError::Config(msg) => ScenarioError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })?;
        if s.name.is_empty() {
            s.name = path.file_stem().map(|x| x.to_string_lossy().into_owned()).unwrap_or_default();
        }
        Ok(s)
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        let bad = |field: &str, msg: String| Err(ScenarioError::Config(format!("field `{field}`: {msg}")));
        if self.mesh.nx == 0 || self.mesh.ny == 0 {
            return bad("mesh.nx/ny", "need at least one element per direction".into());
        }
        if !(self.sim.h > 0.0 && self.sim.h.is_finite()) {
            return bad("sim.h", format!("must be positive, got {}", self.sim.h));
        }
        if !(self.sim.t_end >= self.sim.t0) {
            return bad("sim.t_end", format!("{} precedes t0 = {}", self.sim.t_end, self.sim.t0));
        }
        if self.sensors.is_empty() {
            return bad("sensors", "at least one sensor is required".into());
        }
        match self.reduction {
            Reduction::Krylov { n_r: 0 } | Reduction::Modal { n_r: 0 } => {
                bad("reduction.n_r", "must be positive".into())
            }
            Reduction::CraigBampton { n_k: 0 } => bad("reduction.n_k", "must be positive".into()),
            _ => Ok(()),
        }
    }

    pub fn apply(&mut self, o: &Overrides) -> Result<(), ScenarioError> {
        if let Some(h) = o.h {
            self.sim.h = h;
        }
        if let Some(t) = o.t_end {
            self.sim.t_end = t;
        }
        let current_r = match self.reduction {
            Reduction::Krylov { n_r } | Reduction::Modal { n_r } => Some(n_r),
            _ => None,
        };
        let current_k = match self.reduction {
            Reduction::CraigBampton { n_k } => Some(n_k),
            _ => None,
        };
        let method = o.method.clone().unwrap_or_else(|| self.reduction.label().to_string());
        let need = |v: Option<usize>, flag: &str| {
            v.ok_or_else(|| ScenarioError::Config(format!("method `{method}` needs {flag}")))
        };
        self.reduction = match method.as_str() {
            "none" | "fom" => Reduction::None,
            "krylov" => Reduction::Krylov { n_r: need(o.n_r.or(current_r), "--nr")? },
            "modal" => Reduction::Modal { n_r: need(o.n_r.or(current_r), "--nr")? },
            "craig_bampton" | "cb" => Reduction::CraigBampton { n_k: need(o.n_k.or(current_k), "--nk")? },
            other => return Err(ScenarioError::Config(format!("unknown method `{other}`"))),
        };
        self.validate()
    }

    pub fn mesh_spec(&self) -> Result<MeshSpec, ScenarioError> {
        let mut spec = MeshSpec {
            nx: self.mesh.nx,
            ny: self.mesh.ny,
            domain: self.mesh.domain,
            tears: Vec::new(),
            dirichlet_edges: self.mesh.dirichlet_edges.clone(),
        };
        for (k, tear) in self.mesh.tears.iter().enumerate() {
            let points = match tear {
                TearEntry::Points { points } => points.clone(),
                TearEntry::Segment { from, to } => segment_points(&spec, *from, *to)
                    .map_err(|msg| ScenarioError::Config(format!("field `mesh.tears[{k}]`: {msg}")))?,
            };
            spec.tears.push(TearSpec { points });
        }
        Ok(spec)
    }

    pub fn load_spec(&self) -> LoadSpec {
        match self.load {
            LoadSection::Load1 { position, side } => LoadSpec::load1(position).with_side(side),
            LoadSection::Load2 { position, side } => LoadSpec::load2(position).with_side(side),
            LoadSection::Custom { position, side, direction, amplitude, omega } => {
                LoadSpec::custom(position, direction, amplitude, omega).with_side(side)
            }
            LoadSection::Constant { position, side, direction, amplitude } => {
                LoadSpec::constant(position, direction, amplitude).with_side(side)
            }
        }
    }
}

/// Grid vertices from `from` to `to` inclusive along one grid line.
fn segment_points(spec: &MeshSpec, from: [f64; 2], to: [f64; 2]) -> Result<Vec<[f64; 2]>, String> {
    let a = spec.grid_index(from).ok_or_else(|| format!("{from:?} is not a grid vertex"))?;
    let b = spec.grid_index(to).ok_or_else(|| format!("{to:?} is not a grid vertex"))?;
    if a.0 != b.0 && a.1 != b.1 {
        return Err("segment is not axis-aligned".into());
    }
    let (hx, hy) = spec.spacing();
    let steps = a.0.abs_diff(b.0).max(a.1.abs_diff(b.1));
    let dir = |x: usize, y: usize| (y as f64 - x as f64).clamp(-1.0, 1.0);
    let (di, dj) = (dir(a.0, b.0), dir(a.1, b.1));
    Ok((0..=steps)
        .map(|k| {
            let i = a.0 as f64 + di * k as f64;
            let j = a.1 as f64 + dj * k as f64;
            [spec.domain.x0 + i * hx, spec.domain.y0 + j * hy]
        })
        .collect())
}
