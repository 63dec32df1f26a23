use std::path::PathBuf;

use kerr_core::{LogBase, TruncationPolicy};
use serde::Serialize;

use crate::args::{Common, Format};
use crate::error::CliError;

/// Settings shared by every subcommand.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub tail_tol: f64,
    pub ode_tol: f64,
    pub dim_cap: usize,
    pub log_base: LogBase,
    pub output_format: Format,
    pub output_path: PathBuf,
    pub parallelism: usize,
}

impl RunConfig {
    pub fn from_common(common: &Common, log_base: LogBase) -> Result<Self, CliError> {
        let config = RunConfig {
            tail_tol: common.tail_tol,
            ode_tol: common.ode_tol,
            dim_cap: common.dim_cap,
            log_base,
            output_format: common.format,
            output_path: common.out.clone(),
            parallelism: common.jobs,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if !(self.tail_tol > 0.0 && self.tail_tol <= 1e-3) {
            return Err(CliError::Usage(format!(
                "--tail-tol must lie in (0, 1e-3], got {}",
                self.tail_tol
            )));
        }
        if !(self.ode_tol > 0.0 && self.ode_tol.is_finite()) {
            return Err(CliError::Usage(format!(
                "--ode-tol must be positive, got {}",
                self.ode_tol
            )));
        }
        if self.dim_cap < 30 {
            return Err(CliError::Usage(format!(
                "--dim-cap must be at least 30, got {}",
                self.dim_cap
            )));
        }
        if self.parallelism == 0 {
            return Err(CliError::Usage("--jobs must be at least 1".into()));
        }
        Ok(())
    }

    pub fn policy(&self) -> TruncationPolicy {
        TruncationPolicy {
            tail_tol: self.tail_tol,
            dim_cap: self.dim_cap,
        }
    }
}
