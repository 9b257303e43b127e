use std::io::{self, BufRead, Write};

/// Time series of one simulation run in full coordinates.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Trajectory {
    pub times: Vec<f64>,
    /// `sensor_disp[k][s] = (ux, uy)` of sensor `s` at step `k`.
    pub sensor_disp: Vec<Vec<[f64; 2]>>,
    pub lambda: Vec<Vec<f64>>,
    pub gap: Vec<Vec<f64>>,
    pub energy: Vec<f64>,
    n_sensors: usize,
    n_contacts: usize,
}

#[derive(Debug, thiserror::Error)]
pub enum TrajectoryCsvError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("line {line}: {msg}")]
    Format { line: usize, msg: String },
}

impl Trajectory {
    pub fn new(n_sensors: usize, n_contacts: usize) -> Self {
        Self { n_sensors, n_contacts, ..Default::default() }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn n_sensors(&self) -> usize {
        self.n_sensors
    }

    pub fn n_contacts(&self) -> usize {
        self.n_contacts
    }

    pub fn push(&mut self, t: f64, sensors: &[[f64; 2]], lambda: &[f64], gap: &[f64], energy: f64) {
        assert_eq!(sensors.len(), self.n_sensors, "sensor count");
        assert_eq!(lambda.len(), self.n_contacts, "multiplier count");
        assert_eq!(gap.len(), self.n_contacts, "gap count");
        self.times.push(t);
        self.sensor_disp.push(sensors.to_vec());
        self.lambda.push(lambda.to_vec());
        self.gap.push(gap.to_vec());
        self.energy.push(energy);
    }

    /// Series of one sensor component (`axis` 0 = x, 1 = y).
    pub fn sensor_series(&self, sensor: usize, axis: usize) -> Vec<f64> {
        self.sensor_disp.iter().map(|row| row[sensor][axis]).collect()
    }

    pub fn lambda_series(&self, contact: usize) -> Vec<f64> {
        self.lambda.iter().map(|row| row[contact]).collect()
    }

    pub fn gap_series(&self, contact: usize) -> Vec<f64> {
        self.gap.iter().map(|row| row[contact]).collect()
    }

    /// `max(0, −min gap)` over all steps and contact points.
    pub fn max_penetration(&self) -> f64 {
        self.gap.iter().flatten().fold(0.0f64, |acc, &g| acc.max(-g))
    }

    pub fn header(&self) -> Vec<String> {
        let mut cols = vec!["t".to_string()];
        for s in 0..self.n_sensors {
            cols.push(format!("s{s}_ux"));
            cols.push(format!("s{s}_uy"));
        }
        for c in 0..self.n_contacts {
            cols.push(format!("lambda{c}"));
        }
        for c in 0..self.n_contacts {
            cols.push(format!("gap{c}"));
        }
        cols.push("energy".into());
        cols
    }

    /// Floats are written in shortest round-trip form.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "{}", self.header().join(","))?;
        for k in 0..self.len() {
            let mut row = vec![fmt(self.times[k])];
            for s in &self.sensor_disp[k] {
                row.push(fmt(s[0]));
                row.push(fmt(s[1]));
            }
            row.extend(self.lambda[k].iter().map(|&v| fmt(v)));
            row.extend(self.gap[k].iter().map(|&v| fmt(v)));
            row.push(fmt(self.energy[k]));
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }

    pub fn read_csv<R: BufRead>(r: R) -> Result<Self, TrajectoryCsvError> {
        let mut lines = r.lines();
        let header = lines.next().ok_or(TrajectoryCsvError::Format { line: 1, msg: "empty file".into() })??;
        let cols: Vec<&str> = header.split(',').collect();
        let n_sensors = cols.iter().filter(|c| c.ends_with("_ux")).count();
        let n_contacts = cols.iter().filter(|c| c.starts_with("lambda")).count();
        let mut traj = Self::new(n_sensors, n_contacts);
        if traj.header() != cols {
            return Err(TrajectoryCsvError::Format { line: 1, msg: format!("unexpected header {header:?}") });
        }
        for (i, line) in lines.enumerate() {
            let line = line?;
            if line.is_empty() {
                continue;
            }
            let vals = line
                .split(',')
                .map(|s| s.trim().parse::<f64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| TrajectoryCsvError::Format { line: i + 2, msg: e.to_string() })?;
            if vals.len() != cols.len() {
                return Err(TrajectoryCsvError::Format {
                    line: i + 2,
                    msg: format!("expected {} fields, found {}", cols.len(), vals.len()),
                });
            }
            let sensors: Vec<[f64; 2]> = (0..n_sensors).map(|s| [vals[1 + 2 * s], vals[2 + 2 * s]]).collect();
            let off = 1 + 2 * n_sensors;
            traj.push(
                vals[0],
                &sensors,
                &vals[off..off + n_contacts],
                &vals[off + n_contacts..off + 2 * n_contacts],
                vals[off + 2 * n_contacts],
            );
        }
        Ok(traj)
    }
}

pub(crate) fn fmt(v: f64) -> String {
    format!("{v:e}")
}
