use std::fs;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nalgebra::{DMatrix, DVector};

use contact_mor::mor::{reduce, write_dense};
use contact_mor::scenario::{
    build_basis, build_scenario, displacement_error, emit_plot_data, lambda_error, run_scenario, sensor_error,
    write_outputs, Overrides, RunOptions, Scenario, ScenarioError,
};
use contact_mor::solver::Trajectory;

#[derive(Parser)]
#[command(name = "contact-mor", version, about = "Dynamic contact simulation with reduced-order models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write its output directory.
    Run {
        scenario: PathBuf,
        /// Output directory (default: runs/<scenario name>).
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        overrides: OverrideArgs,
        /// Baseline cache directory (default: .baseline-cache next to the output directory).
        #[arg(long)]
        cache_dir: Option<PathBuf>,
        /// Always recompute the full-order baseline.
        #[arg(long)]
        no_cache: bool,
    },
    /// Compare two trajectories (run directories or CSV files); the first is the reference.
    Compare { reference: PathBuf, candidate: PathBuf },
    /// Write M, K, C, b, the load pattern and the mesh; with a reduction also Q and the reduced matrices.
    ExportMatrices {
        scenario: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        overrides: OverrideArgs,
    },
    /// Plot-ready overlay CSVs of two trajectories.
    PlotData {
        reference: PathBuf,
        candidate: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Sensor index (default: all sensors).
        #[arg(long)]
        sensor: Option<usize>,
    },
}

#[derive(Args)]
struct OverrideArgs {
    /// none | krylov | modal | craig_bampton
    #[arg(long)]
    method: Option<String>,
    /// Reduced dimension for krylov and modal.
    #[arg(long)]
    nr: Option<usize>,
    /// Slave Krylov vectors for craig_bampton.
    #[arg(long)]
    nk: Option<usize>,
    #[arg(long)]
    h: Option<f64>,
    #[arg(long)]
    t_end: Option<f64>,
}

impl OverrideArgs {
    fn to_overrides(&self) -> Overrides {
        Overrides { method: self.method.clone(), n_r: self.nr, n_k: self.nk, h: self.h, t_end: self.t_end }
    }
}

fn load_scenario(path: &Path, o: &OverrideArgs) -> Result<Scenario, ScenarioError> {
    let mut s = Scenario::from_file(path)?;
    s.apply(&o.to_overrides())?;
    Ok(s)
}

fn read_trajectory(path: &Path) -> Result<Trajectory, ScenarioError> {
    let file = if path.is_dir() { path.join("trajectory.csv") } else { path.to_path_buf() };
    let f = fs::File::open(&file).map_err(|e| ScenarioError::io(&file, e))?;
    Trajectory::read_csv(BufReader::new(f)).map_err(|e| ScenarioError::Config(format!("{}: {e}", file.display())))
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<fs::File>, ScenarioError> {
    let path = dir.join(name);
    fs::File::create(&path).map(BufWriter::new).map_err(|e| ScenarioError::io(&path, e))
}

fn run(cli: Cli) -> Result<(), ScenarioError> {
    match cli.command {
        Command::Run { scenario, out, overrides, cache_dir, no_cache } => {
            let s = load_scenario(&scenario, &overrides)?;
            let out = out.unwrap_or_else(|| Path::new("runs").join(&s.name));
            let cache_dir = if no_cache {
                None
            } else {
                Some(cache_dir.unwrap_or_else(|| out.parent().unwrap_or(Path::new(".")).join(".baseline-cache")))
            };
            let outcome = run_scenario(&s, &RunOptions { cache_dir })?;
            write_outputs(&outcome, &out)?;
            let r = &outcome.report;
            println!(
                "{}: {} ({} free DOFs, {} contacts) -> {}",
                s.name,
                r.method,
                r.n_free,
                r.n_constraints,
                out.display()
            );
            if let Some(e) = r.displacement_error {
                println!("  n_r = {}, relative L2 sensor error = {e:.4e}", r.n_r.unwrap_or(0));
            }
            println!("  max penetration = {:.3e}", r.max_penetration);
            Ok(())
        }
        Command::Compare { reference, candidate } => {
            let (a, b) = (read_trajectory(&reference)?, read_trajectory(&candidate)?);
            if a.len() != b.len() || a.n_sensors() != b.n_sensors() || a.n_contacts() != b.n_contacts() {
                return Err(ScenarioError::Config("trajectories have different shapes".into()));
            }
            let mut w = io::stdout().lock();
            let io_err = |e| ScenarioError::io(Path::new("<stdout>"), e);
            writeln!(w, "metric,index,value").map_err(io_err)?;
            for s in 0..a.n_sensors() {
                writeln!(w, "sensor_rel_l2_x,{s},{:e}", sensor_error(&a, &b, s, 0)).map_err(io_err)?;
                writeln!(w, "sensor_rel_l2_y,{s},{:e}", sensor_error(&a, &b, s, 1)).map_err(io_err)?;
            }
            writeln!(w, "displacement_rel_l2,,{:e}", displacement_error(&a, &b)).map_err(io_err)?;
            for c in 0..a.n_contacts() {
                writeln!(w, "lambda_l2,{c},{:e}", lambda_error(&a, &b, c)).map_err(io_err)?;
            }
            writeln!(w, "max_penetration,,{:e}", b.max_penetration()).map_err(io_err)?;
            Ok(())
        }
        Command::ExportMatrices { scenario, out, overrides } => {
            let s = load_scenario(&scenario, &overrides)?;
            let (mesh, sys, _) = build_scenario(&s)?;
            fs::create_dir_all(&out).map_err(|e| ScenarioError::io(&out, e))?;
            let io_err = |e| ScenarioError::io(&out, e);
            sys.m.write_matrix_market(create(&out, "M.mtx")?).map_err(io_err)?;
            sys.k.write_matrix_market(create(&out, "K.mtx")?).map_err(io_err)?;
            write_dense(&sys.c.to_dense(), create(&out, "C.txt")?).map_err(io_err)?;
            write_dense(&column(&sys.b), create(&out, "b.txt")?).map_err(io_err)?;
            write_dense(&column(&sys.load.pattern), create(&out, "load_pattern.txt")?).map_err(io_err)?;
            mesh.write_text(create(&out, "mesh.txt")?).map_err(io_err)?;
            if let Some(basis) = build_basis(&sys, &s.reduction)? {
                let red = reduce(&sys, &basis)?;
                write_dense(&basis.q, create(&out, "Q.txt")?).map_err(io_err)?;
                write_dense(&red.mhat, create(&out, "Mhat.txt")?).map_err(io_err)?;
                write_dense(&red.khat, create(&out, "Khat.txt")?).map_err(io_err)?;
                write_dense(&red.chat, create(&out, "Chat.txt")?).map_err(io_err)?;
            }
            println!("matrices written to {}", out.display());
            Ok(())
        }
        Command::PlotData { reference, candidate, out, sensor } => {
            let (a, b) = (read_trajectory(&reference)?, read_trajectory(&candidate)?);
            fs::create_dir_all(&out).map_err(|e| ScenarioError::io(&out, e))?;
            let sensors: Vec<usize> = match sensor {
                Some(s) => vec![s],
                None if a.n_sensors() == 0 => vec![0],
                None => (0..a.n_sensors()).collect(),
            };
            for s in sensors {
                for f in emit_plot_data(&a, &b, s)? {
                    let path = out.join(&f.name);
                    fs::write(&path, f.contents).map_err(|e| ScenarioError::io(&path, e))?;
                }
            }
            Ok(())
        }
    }
}

fn column(v: &DVector<f64>) -> DMatrix<f64> {
    DMatrix::from_column_slice(v.len(), 1, v.as_slice())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
