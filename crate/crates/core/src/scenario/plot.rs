use std::fmt::Write as _;

use crate::solver::Trajectory;

fn fmt(v: f64) -> String {
    format!("{v:e}")
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PlotError {
    #[error("time axes differ ({0} vs {1} samples, or mismatching values)")]
    AxisMismatch(usize, usize),
    #[error("sensor {index} requested but the trajectories have {available} sensors")]
    NoSuchSensor { index: usize, available: usize },
    #[error("contact counts differ ({0} vs {1})")]
    ContactMismatch(usize, usize),
}

/// One plot-ready CSV file.
#[derive(Debug, Clone, PartialEq)]
pub struct PlotFile {
    pub name: String,
    pub contents: String,
}

/// Overlay files for one sensor: `sensor{s}.csv` with the FOM, ROM and
/// difference of both displacement components, and `lambda.csv` with the
/// multiplier of every contact point.
pub fn emit_plot_data(fom: &Trajectory, rom: &Trajectory, sensor: usize) -> Result<Vec<PlotFile>, PlotError> {
    if fom.len() != rom.len() || fom.times.iter().zip(&rom.times).any(|(a, b)| (a - b).abs() > 1e-9 * (1.0 + a.abs())) {
        return Err(PlotError::AxisMismatch(fom.len(), rom.len()));
    }
    let available = fom.n_sensors().min(rom.n_sensors());
    if sensor >= available {
        return Err(PlotError::NoSuchSensor { index: sensor, available });
    }
    if fom.n_contacts() != rom.n_contacts() {
        return Err(PlotError::ContactMismatch(fom.n_contacts(), rom.n_contacts()));
    }

    let mut disp = String::from("t,fom_ux,rom_ux,diff_ux,fom_uy,rom_uy,diff_uy\n");
    for k in 0..fom.len() {
        let (a, b) = (fom.sensor_disp[k][sensor], rom.sensor_disp[k][sensor]);
        let row = [fom.times[k], a[0], b[0], b[0] - a[0], a[1], b[1], b[1] - a[1]].map(fmt);
        writeln!(disp, "{}", row.join(",")).expect("writing to a String cannot fail");
    }

    let mut lam = String::from("t");
    for c in 0..fom.n_contacts() {
        write!(lam, ",fom_lambda{c},rom_lambda{c}").expect("writing to a String cannot fail");
    }
    lam.push('\n');
    for k in 0..fom.len() {
        let mut row = vec![fmt(fom.times[k])];
        for c in 0..fom.n_contacts() {
            row.push(fmt(fom.lambda[k][c]));
            row.push(fmt(rom.lambda[k][c]));
        }
        writeln!(lam, "{}", row.join(",")).expect("writing to a String cannot fail");
    }

    Ok(vec![
        PlotFile { name: format!("sensor{sensor}.csv"), contents: disp },
        PlotFile { name: "lambda.csv".into(), contents: lam },
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn traj(scale: f64) -> Trajectory {
        let mut t = Trajectory::new(1, 1);
        for k in 0..3 {
            let x = k as f64 * scale;
            t.push(k as f64 * 0.1, &[[x, -x]], &[x.max(0.0)], &[0.0], 0.0);
        }
        t
    }

    #[test]
    fn identical_runs_have_zero_difference() {
        let a = traj(1.0);
        let files = emit_plot_data(&a, &a, 0).unwrap();
        for line in files[0].contents.lines().skip(1) {
            let cols: Vec<f64> = line.split(',').map(|v| v.parse().unwrap()).collect();
            assert_eq!(cols[3], 0.0);
            assert_eq!(cols[6], 0.0);
        }
        assert!(files[1].contents.starts_with("t,fom_lambda0,rom_lambda0\n"));
    }

    #[test]
    fn contract_errors() {
        let a = traj(1.0);
        assert!(matches!(emit_plot_data(&a, &a, 1), Err(PlotError::NoSuchSensor { .. })));
        let empty = Trajectory::new(0, 1);
        assert!(emit_plot_data(&empty, &empty, 0).is_err());
        let mut short = traj(1.0);
        short.times.pop();
        assert!(matches!(emit_plot_data(&a, &short, 0), Err(PlotError::AxisMismatch(..))));
    }
}
