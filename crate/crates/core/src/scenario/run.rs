use std::fs;
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use sha2::{Digest, Sha256};

use super::{emit_plot_data, Reduction, Scenario, ScenarioError};
use crate::fem::{build_system, ContactSystem, LoadSpec, Material, Mesh, MeshSpec};
use crate::mor::{craig_bampton_basis, krylov_basis, modal_basis, reduce, simulate_rom, ReductionBasis};
use crate::solver::{simulate, SimParams, Trajectory};

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Directory for cached full-order baselines; `None` disables caching.
    pub cache_dir: Option<PathBuf>,
}

/// Wall-clock seconds per phase.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Timings {
    /// Mesh, assembly and sensor resolution.
    pub assembly: f64,
    /// Basis construction and projection (reduced runs).
    pub offline: f64,
    /// Time stepping of the requested model.
    pub online: f64,
    /// Full-order baseline (zero on a cache hit).
    pub baseline: f64,
}

/// Error metrics of a reduced run against its full-order baseline.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub method: String,
    pub n_free: usize,
    pub raw_dofs: usize,
    pub n_constraints: usize,
    pub n_r: Option<usize>,
    /// Relative L2 error per sensor, `[x, y]`; absolute when the baseline
    /// component vanishes.
    pub sensor_errors: Vec<[f64; 2]>,
    /// Relative L2 error over all sensors and components together.
    pub displacement_error: Option<f64>,
    /// Absolute L2 error of each multiplier series.
    pub lambda_errors: Vec<f64>,
    /// `max(0, −min gap)` of the requested run.
    pub max_penetration: f64,
    pub baseline_max_penetration: Option<f64>,
    pub timings: Timings,
}

impl ComparisonReport {
    /// Metric table; timings are left out so the file is reproducible.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "metric,index,value")?;
        writeln!(w, "method,,{}", self.method)?;
        writeln!(w, "n_free,,{}", self.n_free)?;
        writeln!(w, "raw_dofs,,{}", self.raw_dofs)?;
        writeln!(w, "n_constraints,,{}", self.n_constraints)?;
        if let Some(n) = self.n_r {
            writeln!(w, "n_r,,{n}")?;
        }
        for (s, e) in self.sensor_errors.iter().enumerate() {
            writeln!(w, "sensor_rel_l2_x,{s},{:e}", e[0])?;
            writeln!(w, "sensor_rel_l2_y,{s},{:e}", e[1])?;
        }
        if let Some(e) = self.displacement_error {
            writeln!(w, "displacement_rel_l2,,{e:e}")?;
        }
        for (c, e) in self.lambda_errors.iter().enumerate() {
            writeln!(w, "lambda_l2,{c},{e:e}")?;
        }
        writeln!(w, "max_penetration,,{:e}", self.max_penetration)?;
        if let Some(p) = self.baseline_max_penetration {
            writeln!(w, "baseline_max_penetration,,{p:e}")?;
        }
        Ok(())
    }
}

fn l2(v: impl Iterator<Item = f64>) -> f64 {
    v.map(|x| x * x).sum::<f64>().sqrt()
}

fn ratio(num: f64, den: f64) -> f64 {
    if den > 0.0 {
        num / den
    } else {
        num
    }
}

/// `‖rom − fom‖ / ‖fom‖` for one sensor component.
pub fn sensor_error(fom: &Trajectory, rom: &Trajectory, sensor: usize, axis: usize) -> f64 {
    let (a, b) = (fom.sensor_series(sensor, axis), rom.sensor_series(sensor, axis));
    ratio(l2(a.iter().zip(&b).map(|(x, y)| y - x)), l2(a.iter().copied()))
}

/// Relative L2 error over every sensor and both components.
pub fn displacement_error(fom: &Trajectory, rom: &Trajectory) -> f64 {
    let flat = |t: &Trajectory| t.sensor_disp.iter().flatten().flatten().copied().collect::<Vec<_>>();
    let (a, b) = (flat(fom), flat(rom));
    ratio(l2(a.iter().zip(&b).map(|(x, y)| y - x)), l2(a.iter().copied()))
}

pub fn lambda_error(fom: &Trajectory, rom: &Trajectory, contact: usize) -> f64 {
    l2(fom.lambda_series(contact).iter().zip(rom.lambda_series(contact)).map(|(x, y)| y - x))
}

/// Everything produced by one scenario run.
#[derive(Debug, Clone)]
pub struct ScenarioOutcome {
    pub scenario: Scenario,
    pub hash: String,
    pub sensor_nodes: Vec<usize>,
    pub trajectory: Trajectory,
    pub baseline: Option<Trajectory>,
    pub cache_hit: bool,
    pub report: ComparisonReport,
}

#[derive(Serialize)]
struct HashInput<'a> {
    mesh: &'a MeshSpec,
    material: &'a Material,
    load: &'a LoadSpec,
    sim: &'a SimParams,
    sensors: &'a [super::SensorSpec],
}

/// SHA-256 over everything that determines the full-order trajectory.
pub fn scenario_hash(s: &Scenario) -> Result<String, ScenarioError> {
    let input = HashInput {
        mesh: &s.mesh_spec()?,
        material: &s.material,
        load: &s.load_spec(),
        sim: &s.sim,
        sensors: &s.sensors,
    };
    let json = serde_json::to_string(&input).expect("scenario types serialize to JSON");
    Ok(format!("{:x}", Sha256::digest(json.as_bytes())))
}

/// Mesh, assembled system and sensor node numbers.
pub fn build_scenario(s: &Scenario) -> Result<(Mesh, ContactSystem, Vec<usize>), ScenarioError> {
    let spec = s.mesh_spec()?;
    s.material.validate()?;
    let (mesh, sys) = build_system(&spec, &s.material, &s.load_spec())?;
    let mut nodes = Vec::with_capacity(s.sensors.len());
    for (k, sensor) in s.sensors.iter().enumerate() {
        let ij = spec.snap(sensor.position).ok_or_else(|| {
            ScenarioError::Config(format!(
                "field `sensors[{k}]`: {:?} is not within half a grid spacing of a node",
                sensor.position
            ))
        })?;
        nodes.push(mesh.node_at(ij, sensor.side));
    }
    Ok((mesh, sys, nodes))
}

pub fn build_basis(sys: &ContactSystem, reduction: &Reduction) -> Result<Option<ReductionBasis>, ScenarioError> {
    Ok(match *reduction {
        Reduction::None => None,
        Reduction::Krylov { n_r } => Some(krylov_basis(sys, n_r)?),
        Reduction::Modal { n_r } => Some(modal_basis(sys, n_r)?),
        Reduction::CraigBampton { n_k } => Some(craig_bampton_basis(sys, n_k)?),
    })
}

fn cached_baseline(dir: &Path, hash: &str) -> Option<Trajectory> {
    let file = fs::File::open(dir.join(format!("{hash}.csv"))).ok()?;
    Trajectory::read_csv(BufReader::new(file)).ok()
}

fn store_baseline(dir: &Path, hash: &str, traj: &Trajectory) -> io::Result<()> {
    fs::create_dir_all(dir)?;
    let tmp = dir.join(format!("{hash}.csv.tmp"));
    traj.write_csv(io::BufWriter::new(fs::File::create(&tmp)?))?;
    fs::rename(tmp, dir.join(format!("{hash}.csv")))
}

/// Runs the requested model. A reduced run is compared against the
/// full-order baseline, taken from the cache when its hash matches and
/// otherwise simulated alongside the reduced model.
pub fn run_scenario(s: &Scenario, opts: &RunOptions) -> Result<ScenarioOutcome, ScenarioError> {
    s.validate()?;
    let hash = scenario_hash(s)?;
    let clock = Instant::now();
    let (_mesh, sys, sensor_nodes) = build_scenario(s)?;
    let mut timings = Timings { assembly: clock.elapsed().as_secs_f64(), ..Default::default() };

    let mut report = ComparisonReport {
        method: s.reduction.label().to_string(),
        n_free: sys.n_free(),
        raw_dofs: sys.raw_dofs,
        n_constraints: sys.n_constraints(),
        n_r: None,
        sensor_errors: Vec::new(),
        displacement_error: None,
        lambda_errors: Vec::new(),
        max_penetration: 0.0,
        baseline_max_penetration: None,
        timings,
    };

    if s.reduction == Reduction::None {
        let clock = Instant::now();
        let traj = simulate(&sys, &s.sim, &sensor_nodes)?;
        timings.online = clock.elapsed().as_secs_f64();
        report.max_penetration = traj.max_penetration();
        report.timings = timings;
        return Ok(ScenarioOutcome {
            scenario: s.clone(),
            hash,
            sensor_nodes,
            trajectory: traj,
            baseline: None,
            cache_hit: false,
            report,
        });
    }

    let cached = opts.cache_dir.as_deref().and_then(|d| cached_baseline(d, &hash));
    let cache_hit = cached.is_some();
    let (baseline, rom) = std::thread::scope(|scope| {
        let fom_job = (!cache_hit).then(|| {
            scope.spawn(|| {
                let clock = Instant::now();
                simulate(&sys, &s.sim, &sensor_nodes).map(|t| (t, clock.elapsed().as_secs_f64()))
            })
        });
        let rom = (|| -> Result<_, ScenarioError> {
            let clock = Instant::now();
            let basis = build_basis(&sys, &s.reduction)?.expect("reduction requested");
            let red = reduce(&sys, &basis)?;
            let offline = clock.elapsed().as_secs_f64();
            let clock = Instant::now();
            let traj = simulate_rom(&sys, &red, &s.sim, &sensor_nodes)?;
            Ok((traj, basis.n_r(), offline, clock.elapsed().as_secs_f64()))
        })();
        let baseline = match fom_job {
            Some(job) => job.join().expect("baseline thread panicked").map(|(t, secs)| (t, secs, false)),
            None => Ok((cached.expect("cache hit"), 0.0, true)),
        };
        (baseline, rom)
    });
    let (baseline, baseline_secs, _) = baseline?;
    let (traj, n_r, offline, online) = rom?;
    if !cache_hit {
        if let Some(dir) = opts.cache_dir.as_deref() {
            store_baseline(dir, &hash, &baseline).map_err(|e| ScenarioError::io(dir, e))?;
        }
    }
    if baseline.len() != traj.len() || baseline.n_sensors() != traj.n_sensors() {
        return Err(ScenarioError::Config(format!("cached baseline {hash} does not match the run; clear the cache")));
    }

    timings.offline = offline;
    timings.online = online;
    timings.baseline = baseline_secs;
    report.n_r = Some(n_r);
    report.sensor_errors = (0..traj.n_sensors())
        .map(|k| [sensor_error(&baseline, &traj, k, 0), sensor_error(&baseline, &traj, k, 1)])
        .collect();
    report.displacement_error = Some(displacement_error(&baseline, &traj));
    report.lambda_errors = (0..traj.n_contacts()).map(|c| lambda_error(&baseline, &traj, c)).collect();
    report.max_penetration = traj.max_penetration();
    report.baseline_max_penetration = Some(baseline.max_penetration());
    report.timings = timings;
    Ok(ScenarioOutcome {
        scenario: s.clone(),
        hash,
        sensor_nodes,
        trajectory: traj,
        baseline: Some(baseline),
        cache_hit,
        report,
    })
}

/// Writes `trajectory.csv`, `report.csv`, `meta` and, for reduced runs,
/// `baseline.csv` and `plots/`.
pub fn write_outputs(out: &ScenarioOutcome, dir: &Path) -> Result<(), ScenarioError> {
    let io_err = |e| ScenarioError::io(dir, e);
    fs::create_dir_all(dir).map_err(io_err)?;
    let create = |name: &str| fs::File::create(dir.join(name)).map(io::BufWriter::new).map_err(io_err);
    out.trajectory.write_csv(create("trajectory.csv")?).map_err(io_err)?;
    out.report.write_csv(create("report.csv")?).map_err(io_err)?;
    if let Some(base) = &out.baseline {
        base.write_csv(create("baseline.csv")?).map_err(io_err)?;
        let plots = dir.join("plots");
        fs::create_dir_all(&plots).map_err(io_err)?;
        for s in 0..out.trajectory.n_sensors() {
            for f in emit_plot_data(base, &out.trajectory, s)? {
                fs::write(plots.join(&f.name), f.contents).map_err(io_err)?;
            }
        }
    }
    let t = out.report.timings;
    let mut meta = create("meta")?;
    let lines = [
        format!("scenario = {}", out.scenario.name),
        format!("scenario_hash = {}", out.hash),
        format!("version = {}", env!("CARGO_PKG_VERSION")),
        format!("method = {}", out.report.method),
        format!("sensor_nodes = {:?}", out.sensor_nodes),
        format!("baseline_cache_hit = {}", out.cache_hit),
        format!("time_assembly_s = {}", t.assembly),
        format!("time_offline_s = {}", t.offline),
        format!("time_online_s = {}", t.online),
        format!("time_baseline_s = {}", t.baseline),
    ];
    for l in lines {
        writeln!(meta, "{l}").map_err(io_err)?;
    }
    Ok(())
}
