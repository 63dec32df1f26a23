//! File emission. Data rows contain only values, formatted with 17
//! significant digits so identical runs give identical bytes; everything
//! run-specific (timestamp, tolerances) goes to `<stem>.meta.json`.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use kerr_core::{SweepResult, SCHEMA_VERSION};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::args::Format;
use crate::config::RunConfig;
use crate::error::CliError;

pub const SUPPORTED_SCHEMA_VERSIONS: &[&str] = &[SCHEMA_VERSION];

/// A rectangular result: numeric columns plus an optional per-row error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub schema_version: String,
    pub kind: String,
    pub parameters: Value,
    pub columns: Vec<String>,
    #[serde(with = "nan_as_null")]
    pub rows: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub errors: Option<Vec<Option<String>>>,
}

impl Table {
    pub fn new(kind: &str, parameters: Value, columns: &[&str]) -> Self {
        Table {
            schema_version: SCHEMA_VERSION.to_string(),
            kind: kind.to_string(),
            parameters,
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            errors: None,
        }
    }

    pub fn from_sweep(sweep: &SweepResult) -> Self {
        let parameters = Value::Object(
            sweep
                .parameters
                .iter()
                .map(|p| (p.name.clone(), serde_json::json!(p.values)))
                .collect(),
        );
        Table {
            schema_version: sweep.schema_version.clone(),
            kind: sweep.kind.clone(),
            parameters,
            columns: sweep
                .input_columns
                .iter()
                .chain(&sweep.output_columns)
                .cloned()
                .collect(),
            rows: sweep
                .rows
                .iter()
                .map(|r| r.inputs.iter().chain(&r.outputs).copied().collect())
                .collect(),
            errors: Some(sweep.rows.iter().map(|r| r.error.clone()).collect()),
        }
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[idx]).collect())
    }
}

mod nan_as_null {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(rows: &[Vec<f64>], s: S) -> Result<S::Ok, S::Error> {
        let mapped: Vec<Vec<Option<f64>>> = rows
            .iter()
            .map(|r| r.iter().map(|v| v.is_finite().then_some(*v)).collect())
            .collect();
        s.collect_seq(mapped)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<f64>>, D::Error> {
        let raw: Vec<Vec<Option<f64>>> = Vec::deserialize(d)?;
        Ok(raw
            .into_iter()
            .map(|r| r.into_iter().map(|v| v.unwrap_or(f64::NAN)).collect())
            .collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    pub schema_version: String,
    pub kind: String,
    pub tool_version: String,
    pub generated_unix: u64,
    pub data_file: String,
    pub format: String,
    pub tail_tol: f64,
    pub ode_tol: f64,
    pub dim_cap: usize,
    pub log_base: String,
    pub parallelism: usize,
    pub parameters: Value,
    #[serde(default)]
    pub notes: Vec<String>,
}

impl Meta {
    pub fn new(table: &Table, config: &RunConfig, data_file: &str) -> Self {
        Meta {
            schema_version: table.schema_version.clone(),
            kind: table.kind.clone(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            generated_unix: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
            data_file: data_file.to_string(),
            format: match config.output_format {
                Format::Csv => "csv",
                Format::Json => "json",
            }
            .to_string(),
            tail_tol: config.tail_tol,
            ode_tol: config.ode_tol,
            dim_cap: config.dim_cap,
            log_base: config.log_base.unit().to_string(),
            parallelism: config.parallelism,
            parameters: table.parameters.clone(),
            notes: Vec::new(),
        }
    }
}

/// `{:.16e}`: 17 significant digits, enough to round-trip any f64. Negative
/// zero is written as zero.
pub fn format_value(v: f64) -> String {
    if v == 0.0 {
        "0.0000000000000000e0".to_string()
    } else if v.is_nan() {
        "NaN".to_string()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{v:.16e}")
    }
}

fn sidecar_path(data: &Path) -> PathBuf {
    let stem = data.file_stem().and_then(|s| s.to_str()).unwrap_or("out");
    data.with_file_name(format!("{stem}.meta.json"))
}

fn csv_bytes(table: &Table) -> Result<Vec<u8>, CliError> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let csv_err = |e: csv::Error| CliError::Format(e.to_string());
    let mut header: Vec<&str> = table.columns.iter().map(String::as_str).collect();
    if table.errors.is_some() {
        header.push("error");
    }
    w.write_record(&header).map_err(csv_err)?;
    for (i, row) in table.rows.iter().enumerate() {
        let mut record: Vec<String> = row.iter().map(|&v| format_value(v)).collect();
        if let Some(errors) = &table.errors {
            record.push(errors[i].clone().unwrap_or_default());
        }
        w.write_record(&record).map_err(csv_err)?;
    }
    w.into_inner().map_err(|e| CliError::Format(e.to_string()))
}

/// Writes `<dir>/<stem>.{csv,json}` and its sidecar; returns the data path.
pub fn write_table(
    table: &Table,
    config: &RunConfig,
    stem: &str,
    notes: Vec<String>,
) -> Result<PathBuf, CliError> {
    let dir = &config.output_path;
    fs::create_dir_all(dir).map_err(|e| CliError::io(format!("creating {}", dir.display()), e))?;
    let (ext, bytes) = match config.output_format {
        Format::Csv => ("csv", csv_bytes(table)?),
        Format::Json => {
            let mut b =
                serde_json::to_vec_pretty(table).map_err(|e| CliError::Format(e.to_string()))?;
            b.push(b'\n');
            ("json", b)
        }
    };
    let path = dir.join(format!("{stem}.{ext}"));
    fs::write(&path, bytes).map_err(|e| CliError::io(format!("writing {}", path.display()), e))?;
    let name = path
        .file_name()
        .and_then(|s| s.to_str())
        .unwrap_or_default();
    let mut meta = Meta::new(table, config, name);
    meta.notes = notes;
    let meta_path = sidecar_path(&path);
    let mut meta_bytes =
        serde_json::to_vec_pretty(&meta).map_err(|e| CliError::Format(e.to_string()))?;
    meta_bytes.push(b'\n');
    fs::write(&meta_path, meta_bytes)
        .map_err(|e| CliError::io(format!("writing {}", meta_path.display()), e))?;
    Ok(path)
}

fn check_version(version: &str, origin: &Path) -> Result<(), CliError> {
    if SUPPORTED_SCHEMA_VERSIONS.contains(&version) {
        Ok(())
    } else {
        Err(CliError::Format(format!(
            "{}: unsupported schema_version {version:?}",
            origin.display()
        )))
    }
}

pub fn read_meta(data: &Path) -> Result<Meta, CliError> {
    let path = sidecar_path(data);
    let text = fs::read_to_string(&path)
        .map_err(|e| CliError::io(format!("reading {}", path.display()), e))?;
    let raw: Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Format(format!("{}: {e}", path.display())))?;
    let version = raw
        .get("schema_version")
        .and_then(Value::as_str)
        .ok_or_else(|| CliError::Format(format!("{}: missing schema_version", path.display())))?;
    check_version(version, &path)?;
    serde_json::from_value(raw).map_err(|e| CliError::Format(format!("{}: {e}", path.display())))
}

fn parse_value(s: &str) -> Result<f64, CliError> {
    match s {
        "NaN" => Ok(f64::NAN),
        "inf" => Ok(f64::INFINITY),
        "-inf" => Ok(f64::NEG_INFINITY),
        _ => s
            .parse()
            .map_err(|_| CliError::Format(format!("bad number {s:?}"))),
    }
}

/// Reads a file produced by [`write_table`], rejecting unknown schema
/// versions. CSV files take their version and parameters from the sidecar.
pub fn read_table(path: &Path) -> Result<Table, CliError> {
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .unwrap_or_default();
    match ext {
        "json" => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::io(format!("reading {}", path.display()), e))?;
            let raw: Value = serde_json::from_str(&text)
                .map_err(|e| CliError::Format(format!("{}: {e}", path.display())))?;
            let version = raw
                .get("schema_version")
                .and_then(Value::as_str)
                .ok_or_else(|| {
                    CliError::Format(format!("{}: missing schema_version", path.display()))
                })?;
            check_version(version, path)?;
            serde_json::from_value(raw)
                .map_err(|e| CliError::Format(format!("{}: {e}", path.display())))
        }
        "csv" => {
            let meta = read_meta(path)?;
            let mut r =
                csv::Reader::from_path(path).map_err(|e| CliError::Format(e.to_string()))?;
            let header: Vec<String> = r
                .headers()
                .map_err(|e| CliError::Format(e.to_string()))?
                .iter()
                .map(String::from)
                .collect();
            let has_error = header.last().map(|h| h == "error").unwrap_or(false);
            let width = header.len() - usize::from(has_error);
            let mut table = Table {
                schema_version: meta.schema_version,
                kind: meta.kind,
                parameters: meta.parameters,
                columns: header[..width].to_vec(),
                rows: Vec::new(),
                errors: has_error.then(Vec::new),
            };
            for record in r.records() {
                let record = record.map_err(|e| CliError::Format(e.to_string()))?;
                let row = (0..width)
                    .map(|i| parse_value(&record[i]))
                    .collect::<Result<Vec<_>, _>>()?;
                table.rows.push(row);
                if let Some(errors) = table.errors.as_mut() {
                    let e = &record[width];
                    errors.push((!e.is_empty()).then(|| e.to_string()));
                }
            }
            Ok(table)
        }
        _ => Err(CliError::Format(format!(
            "{}: unknown extension",
            path.display()
        ))),
    }
}
