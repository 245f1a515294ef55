//! Experiment driver: configs in, trajectories, metrics and CSV files out.

mod config;
mod export;
mod metrics;
mod sweep;

use std::path::Path;

pub use config::{ConfigDocument, ExperimentConfig, GainSettings, LawKind, MetricSettings, ReducedSettings};
pub use export::{
    export_run, read_trajectory_csv, write_reduced, write_reduced_csv, TrajectoryTable, FIELD_FILE, METRICS_FILE,
    TRAJECTORY_FILE,
};
pub use metrics::{
    chattering_index, compute_metrics, fit_decay_rate, MetricContext, Metrics, SeriesView, MIN_DECAY_SAMPLES,
};
pub use sweep::{sweep, write_sweep_csv, ParamGrid, SweepOutcome, SweepRow};

use crate::controllers::{validate_smc_gains, validate_st_gains, GainCheck};
use crate::error::{Error, Result};
use crate::heat_sim::{build_initial_state, simulate, Trajectory};
use crate::reduced_ode::{reaching_time_bound, simulate_smc_reduced, simulate_st_reduced, ReducedTrajectory};
use crate::spectral::{sample_eigenfunction, solve_eigenvalue, Eigenpair};

/// Output of [`run_experiment`].
#[derive(Debug, Clone)]
pub struct TrajectoryRecord {
    pub config: ExperimentConfig,
    pub trajectory: Trajectory<f64>,
    pub metrics: Metrics,
}

impl TrajectoryRecord {
    pub fn export(&self, dir: &Path) -> Result<Vec<std::path::PathBuf>> {
        export_run(dir, &self.trajectory, &self.metrics)
    }
}

pub fn eigenpair(config: &ExperimentConfig) -> Result<Eigenpair<f64>> {
    solve_eigenvalue(config.sim.c0, config.sim.branch)
}

/// `σ(0) = ⟨φ, z₀⟩` on the simulation grid.
pub fn initial_sigma(config: &ExperimentConfig) -> Result<f64> {
    let pair = eigenpair(config)?;
    let grid = config.sim.grid()?;
    let z0 = build_initial_state(&config.sim)?;
    Ok(grid.dot(sample_eigenfunction(&pair, grid).values(), &z0.values))
}

fn metric_context(config: &ExperimentConfig, pair: &Eigenpair<f64>, sigma0: f64) -> Result<MetricContext> {
    let reach_bound = match config.law {
        LawKind::Smc => {
            Some(reaching_time_bound(sigma0, &config.smc_gains()?, &config.sim.disturbance, pair.b_star_phi())?)
        }
        _ => None,
    };
    Ok(MetricContext {
        lambda: pair.lambda(),
        b_star_phi: pair.b_star_phi(),
        dt: config.sim.dt,
        band: config.metrics.band,
        dwell: config.metrics.dwell,
        decay_offset: config.metrics.decay_offset,
        reach_bound,
    })
}

/// Runs the PDE loop for `config.law` and computes its metrics.
pub fn run_experiment(config: &ExperimentConfig) -> Result<TrajectoryRecord> {
    let law = config.control_law()?;
    let trajectory = simulate(&config.sim, &law)?;
    let sigma0 = trajectory.sigma.first().copied().unwrap_or(0.0);
    let ctx = metric_context(config, &trajectory.pair, sigma0)?;
    let view = SeriesView {
        t: &trajectory.t,
        sigma: &trajectory.sigma,
        u: &trajectory.u,
        norm_z: &trajectory.norm_z,
        disturbance: &trajectory.disturbance,
    };
    let metrics = compute_metrics(&view, &ctx);
    Ok(TrajectoryRecord { config: config.clone(), trajectory, metrics })
}

/// Recomputes metrics from an exported `trajectory.csv` and the config that
/// produced it.
pub fn metrics_from_table(config: &ExperimentConfig, table: &TrajectoryTable) -> Result<Metrics> {
    let pair = eigenpair(config)?;
    let sigma0 = *table.sigma.first().ok_or_else(|| Error::Config("empty trajectory".into()))?;
    let ctx = metric_context(config, &pair, sigma0)?;
    let disturbance: Vec<f64> = table.t.iter().map(|&t| config.sim.disturbance.value(t)).collect();
    let view =
        SeriesView { t: &table.t, sigma: &table.sigma, u: &table.u, norm_z: &table.norm_z, disturbance: &disturbance };
    Ok(compute_metrics(&view, &ctx))
}

/// Gain conditions of both laws for the configured disturbance. A missing
/// derivative bound shows up as a failing super-twisting row.
pub fn gain_table(config: &ExperimentConfig) -> Result<Vec<GainCheck<f64>>> {
    let b = eigenpair(config)?.b_star_phi();
    let dist = &config.sim.disturbance;
    let mut rows = validate_smc_gains(&config.smc_gains()?, dist, b)?.checks;
    match validate_st_gains(&config.st_gains()?, dist, b) {
        Ok(report) => rows.extend(report.checks),
        Err(Error::MissingDerivativeBound) => {
            rows.push(GainCheck { law: "st", condition: "C certified", lhs: f64::NAN, rhs: f64::NAN })
        }
        Err(e) => return Err(e),
    }
    Ok(rows)
}

/// Reduced scalar model matching the PDE experiment. `σ₀` defaults to the
/// PDE's `σ(0)` and `w₀` to `B*φ·d(0) + v₀`.
pub fn run_reduced(config: &ExperimentConfig, law: LawKind) -> Result<ReducedTrajectory<f64>> {
    let pair = eigenpair(config)?;
    let b = pair.b_star_phi();
    let r = &config.reduced;
    let sigma0 = match r.sigma0 {
        Some(s) => s,
        None => initial_sigma(config)?,
    };
    let horizon = r.horizon.unwrap_or(config.sim.horizon);
    let dist = &config.sim.disturbance;
    match law {
        LawKind::Smc => simulate_smc_reduced(sigma0, &config.smc_gains()?, b, dist, r.dt, horizon),
        LawKind::St => {
            let w0 = r.w0.unwrap_or(b * dist.value(0.0) + config.gains.v0);
            simulate_st_reduced(sigma0, w0, &config.st_gains()?, b, dist, r.dt, horizon)
        }
        LawKind::Open => Err(Error::invalid("law", "the reduced model needs smc or st")),
    }
}
