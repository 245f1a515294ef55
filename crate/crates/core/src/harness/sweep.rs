//! Parameter sweeps over the cartesian product of config overrides.

use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};

use super::config::ConfigDocument;
use super::metrics::Metrics;
use super::run_experiment;

/// Axes of a sweep: each key takes every listed value (as TOML text).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ParamGrid {
    axes: Vec<(String, Vec<String>)>,
}

impl ParamGrid {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn axis<S: Into<String>>(mut self, key: impl Into<String>, values: impl IntoIterator<Item = S>) -> Self {
        self.axes.push((key.into(), values.into_iter().map(Into::into).collect()));
        self
    }

    /// Parses `key=v1,v2,...`.
    pub fn push_spec(&mut self, spec: &str) -> Result<()> {
        let (key, values) =
            spec.split_once('=').ok_or_else(|| Error::Config(format!("grid axis `{spec}` is not key=v1,v2,...")))?;
        let values: Vec<String> = values.split(',').map(|v| v.trim().to_string()).filter(|v| !v.is_empty()).collect();
        self.axes.push((key.trim().to_string(), values));
        Ok(())
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.axes.iter().map(|(k, _)| k.as_str())
    }

    /// All assignments, last axis varying fastest. Empty when there are no
    /// axes or any axis is empty.
    pub fn points(&self) -> Vec<Vec<(String, String)>> {
        if self.axes.is_empty() {
            return Vec::new();
        }
        let mut points = vec![Vec::new()];
        for (key, values) in &self.axes {
            points = points
                .into_iter()
                .flat_map(|p| {
                    values.iter().map(move |v| {
                        let mut q = p.clone();
                        q.push((key.clone(), v.clone()));
                        q
                    })
                })
                .collect();
        }
        points
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SweepOutcome {
    Completed(Metrics),
    /// The run was refused by a gain condition.
    GainsInvalid(String),
    Failed(String),
}

impl SweepOutcome {
    pub fn status(&self) -> &'static str {
        match self {
            SweepOutcome::Completed(_) => "ok",
            SweepOutcome::GainsInvalid(_) => "gains_invalid",
            SweepOutcome::Failed(_) => "failed",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub assignments: Vec<(String, String)>,
    pub outcome: SweepOutcome,
}

impl SweepRow {
    pub fn metrics(&self) -> Option<&Metrics> {
        match &self.outcome {
            SweepOutcome::Completed(m) => Some(m),
            _ => None,
        }
    }
}

fn run_point(base: &ConfigDocument, point: &[(String, String)]) -> SweepOutcome {
    let mut doc = base.clone();
    let result = point
        .iter()
        .try_for_each(|(k, v)| doc.set(k, v))
        .and_then(|_| doc.to_config())
        .and_then(|c| run_experiment(&c));
    match result {
        Ok(rec) => SweepOutcome::Completed(rec.metrics),
        Err(e @ Error::GainsRejected { .. }) => SweepOutcome::GainsInvalid(e.to_string()),
        Err(e) => SweepOutcome::Failed(e.to_string()),
    }
}

/// Runs every grid point in parallel. Rows come back in grid order and a
/// failing point does not stop the others.
pub fn sweep(base: &ConfigDocument, grid: &ParamGrid) -> Vec<SweepRow> {
    grid.points()
        .into_par_iter()
        .map(|assignments| {
            let outcome = run_point(base, &assignments);
            SweepRow { assignments, outcome }
        })
        .collect()
}

/// One line per row: the swept keys, `status`, the metric columns and
/// `message`.
pub fn write_sweep_csv<W: std::io::Write>(out: W, grid: &ParamGrid, rows: &[SweepRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<&str> = grid.keys().collect();
    header.push("status");
    header.extend(Metrics::FIELDS);
    header.push("message");
    w.write_record(&header)?;
    for row in rows {
        let mut rec: Vec<String> = row.assignments.iter().map(|(_, v)| v.clone()).collect();
        rec.push(row.outcome.status().to_string());
        match &row.outcome {
            SweepOutcome::Completed(m) => {
                rec.extend(m.to_record());
                rec.push(String::new());
            }
            SweepOutcome::GainsInvalid(msg) | SweepOutcome::Failed(msg) => {
                rec.extend(std::iter::repeat_n(String::new(), Metrics::FIELDS.len()));
                rec.push(msg.clone());
            }
        }
        w.write_record(&rec)?;
    }
    w.flush().map_err(|e| Error::io(Path::new("<sweep output>"), e))
}
