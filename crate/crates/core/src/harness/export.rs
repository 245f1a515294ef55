//! CSV output. Floats are written with the shortest representation that
//! round-trips, so re-running a config reproduces the files byte for byte.

use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::heat_sim::Trajectory;
use crate::reduced_ode::ReducedTrajectory;

use super::metrics::Metrics;

pub const TRAJECTORY_FILE: &str = "trajectory.csv";
pub const FIELD_FILE: &str = "field.csv";
pub const METRICS_FILE: &str = "metrics.csv";

fn writer(path: &Path) -> Result<csv::Writer<std::fs::File>> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::Writer::from_writer(file))
}

fn finish(mut w: csv::Writer<std::fs::File>, path: &Path) -> Result<()> {
    w.flush().map_err(|e| Error::io(path, e))
}

/// Writes `trajectory.csv`, `field.csv` (when snapshots exist) and
/// `metrics.csv` into `dir`, creating it if needed. Returns the paths written.
pub fn export_run(dir: &Path, traj: &Trajectory<f64>, metrics: &Metrics) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = Vec::new();

    let path = dir.join(TRAJECTORY_FILE);
    let mut w = writer(&path)?;
    w.write_record(["t", "sigma", "u", "aux", "norm_z"])?;
    for k in 0..traj.len() {
        w.write_record([
            traj.t[k].to_string(),
            traj.sigma[k].to_string(),
            traj.u[k].to_string(),
            traj.aux[k].to_string(),
            traj.norm_z[k].to_string(),
        ])?;
    }
    finish(w, &path)?;
    written.push(path);

    if !traj.snapshots.is_empty() {
        let path = dir.join(FIELD_FILE);
        let mut w = writer(&path)?;
        w.write_record(["t", "x", "z"])?;
        for snap in &traj.snapshots {
            for (x, z) in traj.grid.nodes().zip(&snap.values) {
                w.write_record([snap.t.to_string(), x.to_string(), z.to_string()])?;
            }
        }
        finish(w, &path)?;
        written.push(path);
    }

    let path = dir.join(METRICS_FILE);
    let mut w = writer(&path)?;
    w.write_record(Metrics::FIELDS)?;
    w.write_record(metrics.to_record())?;
    finish(w, &path)?;
    written.push(path);
    Ok(written)
}

/// Columns of a `trajectory.csv`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrajectoryTable {
    pub t: Vec<f64>,
    pub sigma: Vec<f64>,
    pub u: Vec<f64>,
    pub aux: Vec<f64>,
    pub norm_z: Vec<f64>,
}

pub fn read_trajectory_csv(path: &Path) -> Result<TrajectoryTable> {
    let mut r = csv::Reader::from_path(path)?;
    let headers = r.headers()?.clone();
    if headers.iter().collect::<Vec<_>>() != ["t", "sigma", "u", "aux", "norm_z"] {
        return Err(Error::Config(format!("{}: unexpected header", path.display())));
    }
    let mut out = TrajectoryTable::default();
    for (line, rec) in r.records().enumerate() {
        let rec = rec?;
        let mut vals = [0.0; 5];
        for (slot, field) in vals.iter_mut().zip(rec.iter()) {
            *slot = field
                .parse()
                .map_err(|_| Error::Config(format!("{}: row {}: bad number `{field}`", path.display(), line + 1)))?;
        }
        out.t.push(vals[0]);
        out.sigma.push(vals[1]);
        out.u.push(vals[2]);
        out.aux.push(vals[3]);
        out.norm_z.push(vals[4]);
    }
    Ok(out)
}

/// Writes a reduced trajectory as `t,sigma[,w],selection`, keeping every
/// `stride`-th sample and the last one.
pub fn write_reduced<W: std::io::Write>(out: W, traj: &ReducedTrajectory<f64>, stride: usize) -> Result<()> {
    let stride = stride.max(1);
    let mut w = csv::Writer::from_writer(out);
    match &traj.w {
        Some(_) => w.write_record(["t", "sigma", "w", "selection"])?,
        None => w.write_record(["t", "sigma", "selection"])?,
    }
    let n = traj.t.len();
    for k in (0..n).filter(|&k| k % stride == 0 || k + 1 == n) {
        let mut rec = vec![traj.t[k].to_string(), traj.sigma[k].to_string()];
        if let Some(wv) = &traj.w {
            rec.push(wv[k].to_string());
        }
        rec.push(traj.selection[k].to_string());
        w.write_record(&rec)?;
    }
    w.flush().map_err(|e| Error::io(Path::new("<reduced output>"), e))
}

pub fn write_reduced_csv(path: &Path, traj: &ReducedTrajectory<f64>, stride: usize) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_reduced(std::io::BufWriter::new(file), traj, stride)
}
