//! Scenario files, full/reduced comparison runs and their on-disk outputs.

mod config;
mod plot;
mod run;

pub use config::{LoadSection, MeshSection, Overrides, Reduction, Scenario, SensorSpec, TearEntry};
pub use plot::{emit_plot_data, PlotError, PlotFile};
pub use run::{
    build_basis, build_scenario, displacement_error, lambda_error, run_scenario, scenario_hash, sensor_error,
    write_outputs, ComparisonReport, RunOptions, ScenarioOutcome, Timings,
};

use std::io;
use std::path::{Path, PathBuf};

use crate::fem::FemError;
use crate::mor::MorError;
use crate::solver::SolverError;

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Mor(#[from] MorError),
    #[error(transparent)]
    Plot(#[from] PlotError),
}

impl ScenarioError {
    pub fn io(path: &Path, source: io::Error) -> Self {
        ScenarioError::Io { path: path.to_path_buf(), source }
    }

    /// Process exit code: 2 for configuration errors, 3 for solver failures,
    /// 1 for anything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            ScenarioError::Config(_) => 2,
            ScenarioError::Solver(SolverError::InvalidParams(_) | SolverError::SensorNotFound(_)) => 2,
            ScenarioError::Mor(MorError::InvalidSize(_) | MorError::ZeroSeed) => 2,
            ScenarioError::Solver(_) | ScenarioError::Mor(_) => 3,
            ScenarioError::Io { .. } | ScenarioError::Plot(_) => 1,
        }
    }
}

/// Invalid geometry or material is a configuration problem; a failed
/// factorization is a solver failure.
impl From<FemError> for ScenarioError {
    fn from(e: FemError) -> Self {
        match e {
            FemError::Linalg(_) => ScenarioError::Solver(SolverError::Fem(e)),
            other => ScenarioError::Config(other.to_string()),
        }
    }
}
