//! Parameter sweeps: a base scenario crossed with per-key value lists.
//!
//! A grid is `key=v1,v2,...` lines using the same keys as scenario files.
//! Each combination overrides the base scenario's serialized form and
//! re-parses it, so overrides face exactly the validation a hand-written
//! file would. Runs execute in parallel; a failing combination records its
//! error and the sweep carries on.

use rayon::prelude::*;
use thiserror::Error;

use super::run::{run_scenario, RunSummary};
use super::scenario::Scenario;

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("grid line {line}: expected key=v1,v2,..., got {got:?}")]
    Syntax { line: usize, got: String },
    #[error("grid line {line}: duplicate axis {key:?}")]
    DuplicateAxis { line: usize, key: String },
    #[error("grid line {line}: axis {key:?} has no values")]
    EmptyAxis { line: usize, key: String },
    #[error("grid has no axes")]
    EmptyGrid,
}

/// Ordered axes; the last axis varies fastest in the cross product.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepGrid {
    pub axes: Vec<(String, Vec<String>)>,
}

impl SweepGrid {
    pub fn parse(text: &str) -> Result<SweepGrid, SweepError> {
        let mut axes: Vec<(String, Vec<String>)> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let Some((key, values)) = trimmed.split_once('=') else {
                return Err(SweepError::Syntax { line, got: trimmed.to_string() });
            };
            let key = key.trim().to_string();
            if axes.iter().any(|(k, _)| *k == key) {
                return Err(SweepError::DuplicateAxis { line, key });
            }
            let values: Vec<String> = values
                .split(',')
                .map(|v| v.trim().to_string())
                .filter(|v| !v.is_empty())
                .collect();
            if values.is_empty() {
                return Err(SweepError::EmptyAxis { line, key });
            }
            axes.push((key, values));
        }
        if axes.is_empty() {
            return Err(SweepError::EmptyGrid);
        }
        Ok(SweepGrid { axes })
    }

    pub fn combinations(&self) -> usize {
        self.axes.iter().map(|(_, vs)| vs.len()).product()
    }

    /// Override pairs of combination `index` (row-major over the axes).
    fn overrides(&self, index: usize) -> Vec<(String, String)> {
        let mut rem = index;
        let mut picks = vec![0usize; self.axes.len()];
        for (slot, (_, values)) in self.axes.iter().enumerate().rev() {
            picks[slot] = rem % values.len();
            rem /= values.len();
        }
        self.axes
            .iter()
            .zip(picks)
            .map(|((key, values), pick)| (key.clone(), values[pick].clone()))
            .collect()
    }
}

/// One grid point's result. `result` carries the failing stage's message
/// instead of aborting the sweep.
#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub index: usize,
    pub overrides: Vec<(String, String)>,
    pub result: Result<RunSummary, String>,
}

fn run_point(base: &Scenario, index: usize, overrides: &[(String, String)]) -> Result<RunSummary, String> {
    let mut text = String::new();
    for line in base.to_text().lines() {
        let key = line.split_once('=').map(|(k, _)| k).unwrap_or("");
        if !overrides.iter().any(|(k, _)| k == key) {
            text.push_str(line);
            text.push('\n');
        }
    }
    for (key, value) in overrides {
        text.push_str(key);
        text.push('=');
        text.push_str(value);
        text.push('\n');
    }
    let mut scenario = Scenario::parse(&text).map_err(|e| e.to_string())?;
    scenario.name = format!("{}_{index:03}", scenario.name);
    scenario.detector = base.detector.clone();
    let artifacts = run_scenario(&scenario).map_err(|e| e.to_string())?;
    Ok(artifacts.summary)
}

/// Runs every combination of `grid` over `base`, in parallel, outcomes in
/// combination order.
pub fn run_sweep(base: &Scenario, grid: &SweepGrid) -> Vec<SweepOutcome> {
    (0..grid.combinations())
        .into_par_iter()
        .map(|index| {
            let overrides = grid.overrides(index);
            let result = run_point(base, index, &overrides);
            SweepOutcome { index, overrides, result }
        })
        .collect()
}
