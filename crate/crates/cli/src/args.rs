use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use kerr_core::ode::DEFAULT_ODE_TOL;
use kerr_core::{HolevoVariant, LogBase, DEFAULT_TAIL_TOL};
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(
    name = "lossy-kerr",
    version,
    about = "Coherent pulses in a lossy Kerr medium"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Husimi Q function of the output state, one grid per output intensity
    Qfunc(QfuncArgs),
    /// The exponent function f_tau(kappa) and its quadratic expansion
    Ffunc(FfuncArgs),
    /// Infidelity of the Gaussian phase-noise approximation
    Infidelity(InfidelityArgs),
    /// Holevo quantity of the phase-keyed ring constellation
    Holevo(HolevoArgs),
    /// Attainable squeezing with phase noise and loss
    Squeezing(SqueezingArgs),
    /// Check the closed-form output state against the master equation
    OracleCheck(OracleCheckArgs),
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Output directory
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Worker threads for sweep points
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    /// Poisson mass allowed beyond the Fock cutoff
    #[arg(long, default_value_t = DEFAULT_TAIL_TOL)]
    pub tail_tol: f64,
    /// Largest Fock cutoff any point may use
    #[arg(long, default_value_t = 4096)]
    pub dim_cap: usize,
    /// Step-doubling tolerance of the master-equation integrator
    #[arg(long, default_value_t = DEFAULT_ODE_TOL)]
    pub ode_tol: f64,
}

#[derive(Args, Debug)]
pub struct QfuncArgs {
    #[arg(long)]
    pub tau: f64,
    #[arg(long)]
    pub kappa: f64,
    #[arg(long = "tau-nbar")]
    pub tau_nbar: ValueList,
    /// RADIUS:POINTS; defaults to sqrt(tau_nbar) + 6 with 201 points
    #[arg(long)]
    pub grid: Option<GridArg>,
    /// Include the unitary Kerr rotation (laboratory frame)
    #[arg(long)]
    pub lab_frame: bool,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct FfuncArgs {
    #[arg(long)]
    pub tau: ValueList,
    #[arg(long, allow_hyphen_values = true)]
    pub kappa: ValueList,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct InfidelityArgs {
    #[arg(long)]
    pub tau: f64,
    #[arg(long)]
    pub kappa: ValueList,
    #[arg(long = "tau-nbar")]
    pub tau_nbar: ValueList,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct HolevoArgs {
    #[arg(long)]
    pub tau: f64,
    #[arg(long)]
    pub kappa: ValueList,
    #[arg(long = "tau-nbar")]
    pub tau_nbar: ValueList,
    #[arg(long, value_enum, default_value_t = Variant::Exact)]
    pub variant: Variant,
    #[arg(long, value_enum, default_value_t = LogBaseArg::Two)]
    pub log_base: LogBaseArg,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct SqueezingArgs {
    #[arg(long)]
    pub nbar: f64,
    #[arg(long)]
    pub tau: ValueList,
    #[arg(long)]
    pub kappa: ValueList,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct OracleCheckArgs {
    #[arg(long)]
    pub tau: f64,
    #[arg(long)]
    pub kappa: f64,
    /// Input mean photon number
    #[arg(long)]
    pub nbar: f64,
    /// Fixed RK4 step count; by default steps are doubled until converged
    #[arg(long)]
    pub steps: Option<usize>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Variant {
    Gaussian,
    Exact,
}

impl From<Variant> for HolevoVariant {
    fn from(v: Variant) -> Self {
        match v {
            Variant::Gaussian => HolevoVariant::Gaussian,
            Variant::Exact => HolevoVariant::Exact,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LogBaseArg {
    #[value(name = "2", alias = "bits")]
    Two,
    #[value(name = "e", alias = "nats")]
    E,
}

impl From<LogBaseArg> for LogBase {
    fn from(b: LogBaseArg) -> Self {
        match b {
            LogBaseArg::Two => LogBase::Bits,
            LogBaseArg::E => LogBase::Nats,
        }
    }
}

/// A list of reals: `a,b,c`, `lin:start:stop:count` or `log:start:stop:count`.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueList(pub Vec<f64>);

impl FromStr for ValueList {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_list(s).map(ValueList)
    }
}

fn parse_real(s: &str) -> Result<f64, String> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| format!("not a number: {s:?}"))?;
    if !v.is_finite() {
        return Err(format!("not finite: {s:?}"));
    }
    Ok(v)
}

pub fn parse_list(s: &str) -> Result<Vec<f64>, String> {
    let s = s.trim();
    if let Some(rest) = s.strip_prefix("lin:").or_else(|| s.strip_prefix("log:")) {
        let log = s.starts_with("log:");
        let parts: Vec<&str> = rest.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("range needs start:stop:count, got {rest:?}"));
        }
        let (a, b) = (parse_real(parts[0])?, parse_real(parts[1])?);
        let n: usize = parts[2]
            .trim()
            .parse()
            .map_err(|_| format!("bad count {:?}", parts[2]))?;
        if n == 0 {
            return Err("range count must be positive".into());
        }
        if n == 1 {
            return Ok(vec![a]);
        }
        if log && (a <= 0.0 || b <= 0.0) {
            return Err("log range endpoints must be positive".into());
        }
        let last = (n - 1) as f64;
        let mut out: Vec<f64> = (0..n)
            .map(|i| {
                let t = i as f64 / last;
                if log {
                    (a.ln() + (b.ln() - a.ln()) * t).exp()
                } else {
                    a + (b - a) * t
                }
            })
            .collect();
        out[0] = a;
        out[n - 1] = b;
        return Ok(out);
    }
    if s.is_empty() {
        return Err("empty list".into());
    }
    s.split(',').map(parse_real).collect()
}

/// `RADIUS:POINTS`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridArg {
    pub radius: f64,
    pub points: usize,
}

impl FromStr for GridArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (r, p) = s
            .split_once(':')
            .ok_or_else(|| format!("grid must be RADIUS:POINTS, got {s:?}"))?;
        let radius = parse_real(r)?;
        let points = p
            .trim()
            .parse()
            .map_err(|_| format!("bad point count {p:?}"))?;
        Ok(GridArg { radius, points })
    }
}
