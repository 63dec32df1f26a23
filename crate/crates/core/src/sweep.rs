//! Tabular results of parameter sweeps and the machinery shared by the sweep
//! drivers.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{KerrError, Result};
use crate::fock::{truncation_dimension, FockDim, DEFAULT_TAIL_TOL};

pub const SCHEMA_VERSION: &str = "1.0";

/// How Fock cutoffs are chosen for a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncationPolicy {
    pub tail_tol: f64,
    /// Largest `n_max` a sweep point may request.
    pub dim_cap: usize,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        TruncationPolicy {
            tail_tol: DEFAULT_TAIL_TOL,
            dim_cap: 4096,
        }
    }
}

impl TruncationPolicy {
    pub fn dim_for(&self, mean_photon: f64) -> Result<FockDim> {
        let dim = truncation_dimension(mean_photon, self.tail_tol)?;
        if dim.n_max() > self.dim_cap {
            return Err(KerrError::DimensionCapExceeded {
                required: dim.n_max(),
                cap: self.dim_cap,
            });
        }
        Ok(dim)
    }
}

/// One named sweep axis or fixed parameter, in declaration order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepParameter {
    pub name: String,
    pub values: Vec<f64>,
}

/// One sweep point: the full input tuple, the outputs, and an error message
/// when the point failed (outputs are then NaN).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub inputs: Vec<f64>,
    pub outputs: Vec<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepMetadata {
    pub tool_version: String,
    pub tail_tol: f64,
    pub dim_cap: usize,
    pub ode_tol: Option<f64>,
    pub log_base: Option<String>,
}

impl SweepMetadata {
    pub fn new(policy: &TruncationPolicy) -> Self {
        SweepMetadata {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            tail_tol: policy.tail_tol,
            dim_cap: policy.dim_cap,
            ode_tol: None,
            log_base: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub schema_version: String,
    pub kind: String,
    pub parameters: Vec<SweepParameter>,
    pub input_columns: Vec<String>,
    pub output_columns: Vec<String>,
    pub rows: Vec<SweepRow>,
    pub metadata: SweepMetadata,
}

impl SweepResult {
    pub fn new(
        kind: &str,
        parameters: Vec<SweepParameter>,
        input_columns: &[&str],
        output_columns: &[&str],
        metadata: SweepMetadata,
    ) -> Self {
        SweepResult {
            schema_version: SCHEMA_VERSION.to_string(),
            kind: kind.to_string(),
            parameters,
            input_columns: input_columns.iter().map(|s| s.to_string()).collect(),
            output_columns: output_columns.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
            metadata,
        }
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.input_columns
            .iter()
            .chain(&self.output_columns)
            .position(|c| c == name)
    }

    /// Value of a named column in `row`.
    pub fn value(&self, row: &SweepRow, name: &str) -> Option<f64> {
        let idx = self.column_index(name)?;
        if idx < self.input_columns.len() {
            row.inputs.get(idx).copied()
        } else {
            row.outputs.get(idx - self.input_columns.len()).copied()
        }
    }

    pub fn failed_rows(&self) -> impl Iterator<Item = &SweepRow> {
        self.rows.iter().filter(|r| r.error.is_some())
    }

    pub(crate) fn push_outcome(&mut self, inputs: Vec<f64>, outcome: Result<Vec<f64>>) {
        let width = self.output_columns.len();
        let row = match outcome {
            Ok(outputs) => SweepRow {
                inputs,
                outputs,
                error: None,
            },
            Err(e) => SweepRow {
                inputs,
                outputs: vec![f64::NAN; width],
                error: Some(e.to_string()),
            },
        };
        self.rows.push(row);
    }
}

/// Sorted, deduplicated copy of an axis; rejects empty or non-finite axes.
pub fn sorted_axis(name: &'static str, values: &[f64]) -> Result<Vec<f64>> {
    if values.is_empty() {
        return Err(KerrError::invalid(name, "axis is empty"));
    }
    if let Some(v) = values.iter().find(|v| !v.is_finite()) {
        return Err(KerrError::invalid(name, format!("non-finite value {v}")));
    }
    let mut axis = values.to_vec();
    axis.sort_by(f64::total_cmp);
    axis.dedup();
    Ok(axis)
}

/// Cartesian product of two axes in row-major order.
pub fn grid2(outer: &[f64], inner: &[f64]) -> Vec<(f64, f64)> {
    outer
        .iter()
        .flat_map(|&a| inner.iter().map(move |&b| (a, b)))
        .collect()
}

/// Evaluates `f` on every point, preserving order. With `jobs > 1` the
/// points are spread over a dedicated pool of that many threads.
pub fn map_points<P, R, F>(points: &[P], jobs: usize, f: F) -> Result<Vec<R>>
where
    P: Sync,
    R: Send,
    F: Fn(&P) -> R + Sync + Send,
{
    if jobs <= 1 {
        return Ok(points.iter().map(f).collect());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| KerrError::invalid("jobs", e.to_string()))?;
    Ok(pool.install(|| points.par_iter().map(f).collect()))
}
