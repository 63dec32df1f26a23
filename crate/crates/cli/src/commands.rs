use kerr_core::ode::{ode_oracle_converged, ode_oracle_with_tol};
use kerr_core::sweep::map_points;
use kerr_core::{
    exact_output_state, f_tau, f_tau_quadratic, holevo_curves, husimi_q, infidelity_map,
    squeezing_curve, ChannelGeometry, CoherentAmplitude, DensityOperator, GridSpec, KerrError,
    LogBase, MediumParams,
};
use serde_json::json;

use crate::args::{
    Cli, Command, FfuncArgs, HolevoArgs, InfidelityArgs, OracleCheckArgs, QfuncArgs, SqueezingArgs,
};
use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::{write_table, Table};

/// Largest output intensity accepted by `oracle-check`.
pub const ORACLE_MAX_TAU_NBAR: f64 = 50.0;

/// Elementwise agreement required by `oracle-check`.
pub const ORACLE_MATCH_TOL: f64 = 1e-8;

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Qfunc(a) => qfunc(a),
        Command::Ffunc(a) => ffunc(a),
        Command::Infidelity(a) => infidelity(a),
        Command::Holevo(a) => holevo(a),
        Command::Squeezing(a) => squeezing(a),
        Command::OracleCheck(a) => oracle_check(a),
    }
}

fn channel(kappa: f64, tau: f64) -> Result<(MediumParams, ChannelGeometry), CliError> {
    let medium = MediumParams::from_kappa(kappa)?;
    let geom = ChannelGeometry::from_transmission(&medium, tau)?;
    Ok((medium, geom))
}

fn report_written(path: &std::path::Path) {
    println!("wrote {}", path.display());
}

fn qfunc(a: QfuncArgs) -> Result<(), CliError> {
    let config = RunConfig::from_common(&a.common, LogBase::Bits)?;
    let (medium, geom) = channel(a.kappa, a.tau)?;
    let policy = config.policy();
    let tau_nbars = kerr_core::sweep::sorted_axis("tau_nbar", &a.tau_nbar.0)?;
    if let Some(v) = tau_nbars.iter().find(|v| **v < 0.0) {
        return Err(CliError::Usage(format!(
            "--tau-nbar must be nonnegative, got {v}"
        )));
    }
    let grids = map_points(&tau_nbars, config.parallelism, |&tn| {
        let input = CoherentAmplitude::from_mean_photon(tn / geom.tau(), 0.0)?;
        let dim = policy.dim_for(tn)?;
        let mut rho: DensityOperator = exact_output_state(&medium, &geom, input, dim)?;
        if a.lab_frame {
            rho = rho.with_kerr_phase(geom.kerr_phase(&medium));
        }
        let spec = match a.grid {
            Some(g) => GridSpec::new(g.radius, g.points)?,
            None => GridSpec::covering(tn),
        };
        Ok::<_, KerrError>((spec, husimi_q(&rho, spec)?))
    })?;
    for (&tn, outcome) in tau_nbars.iter().zip(grids) {
        let (spec, q) = outcome?;
        let mut table = Table::new(
            "qfunc",
            json!({
                "tau": a.tau,
                "kappa": a.kappa,
                "tau_nbar": tn,
                "radius": spec.radius,
                "points": spec.points,
                "frame": if a.lab_frame { "laboratory" } else { "interaction" },
            }),
            &["re", "im", "q"],
        );
        for (j, &re) in q.re_axis.iter().enumerate() {
            for (i, &im) in q.im_axis.iter().enumerate() {
                table.rows.push(vec![re, im, q.values[i][j]]);
            }
        }
        let mut notes = vec![format!("boundary_mass={:e}", q.boundary_mass)];
        if let Some(w) = &q.warning {
            println!("warning: tau_nbar={tn}: {w}");
            notes.push(w.clone());
        }
        let path = write_table(&table, &config, &format!("qfunc_taunbar_{tn}"), notes)?;
        report_written(&path);
    }
    Ok(())
}

fn ffunc(a: FfuncArgs) -> Result<(), CliError> {
    let config = RunConfig::from_common(&a.common, LogBase::Bits)?;
    let taus = kerr_core::sweep::sorted_axis("tau", &a.tau.0)?;
    let kappas = kerr_core::sweep::sorted_axis("kappa", &a.kappa.0)?;
    for &tau in &taus {
        let mut table = Table::new(
            "ffunc",
            json!({ "tau": tau, "kappa": kappas }),
            &["kappa", "re_f", "im_f", "re_f_quad", "im_f_quad"],
        );
        for &kappa in &kappas {
            let f = f_tau(tau, kappa)?;
            let q = f_tau_quadratic(tau, kappa)?;
            table.rows.push(vec![kappa, f.re, f.im, q.re, q.im]);
        }
        let path = write_table(&table, &config, &format!("ffunc_tau_{tau}"), Vec::new())?;
        report_written(&path);
    }
    Ok(())
}

fn failure_notes(table: &Table) -> Vec<String> {
    let failed = table
        .errors
        .as_ref()
        .map(|e| e.iter().filter(|e| e.is_some()).count())
        .unwrap_or(0);
    if failed > 0 {
        println!("{failed} point(s) failed; see the error column");
        vec![format!("failed_points={failed}")]
    } else {
        Vec::new()
    }
}

fn infidelity(a: InfidelityArgs) -> Result<(), CliError> {
    let config = RunConfig::from_common(&a.common, LogBase::Bits)?;
    let sweep = infidelity_map(
        &a.kappa.0,
        a.tau,
        &a.tau_nbar.0,
        &config.policy(),
        config.parallelism,
    )?;
    let table = Table::from_sweep(&sweep);
    let notes = failure_notes(&table);
    let path = write_table(&table, &config, "infidelity", notes)?;
    report_written(&path);
    Ok(())
}

fn holevo(a: HolevoArgs) -> Result<(), CliError> {
    let config = RunConfig::from_common(&a.common, a.log_base.into())?;
    let sweep = holevo_curves(
        &a.kappa.0,
        a.tau,
        &a.tau_nbar.0,
        a.variant.into(),
        config.log_base,
        &config.policy(),
        config.parallelism,
    )?;
    let table = Table::from_sweep(&sweep);
    let notes = failure_notes(&table);
    let path = write_table(&table, &config, "holevo", notes)?;
    report_written(&path);
    Ok(())
}

fn squeezing(a: SqueezingArgs) -> Result<(), CliError> {
    let config = RunConfig::from_common(&a.common, LogBase::Bits)?;
    let sweep = squeezing_curve(a.nbar, &a.tau.0, &a.kappa.0, config.parallelism)?;
    let table = Table::from_sweep(&sweep);
    let notes = failure_notes(&table);
    let path = write_table(&table, &config, "squeezing", notes)?;
    report_written(&path);
    Ok(())
}

fn oracle_check(a: OracleCheckArgs) -> Result<(), CliError> {
    let config = RunConfig::from_common(&a.common, LogBase::Bits)?;
    let (medium, geom) = channel(a.kappa, a.tau)?;
    let input = CoherentAmplitude::from_mean_photon(a.nbar, 0.0)?;
    let tau_nbar = a.tau * a.nbar;
    if tau_nbar > ORACLE_MAX_TAU_NBAR {
        return Err(CliError::Usage(format!(
            "oracle-check is limited to tau * nbar <= {ORACLE_MAX_TAU_NBAR}, got {tau_nbar}"
        )));
    }
    let dim = config.policy().dim_for(tau_nbar)?;
    let run = match a.steps {
        Some(0) => return Err(CliError::Usage("--steps must be positive".into())),
        Some(steps) => ode_oracle_with_tol(&medium, geom.z(), input, dim, steps, config.ode_tol)?,
        None => ode_oracle_converged(&medium, geom.z(), input, dim, 64, 14, config.ode_tol)?,
    };
    let exact = exact_output_state(&medium, &geom, input, dim)?;
    let deviation = run.state.max_abs_diff(&exact)?;
    let pass = deviation < ORACLE_MATCH_TOL;
    println!(
        "oracle-check tau={} kappa={} nbar={}",
        a.tau, a.kappa, a.nbar
    );
    println!("  fock cutoff    n_max={}", dim.n_max());
    println!("  rk4 steps      {}", run.steps);
    println!("  step change    {:.3e}", run.max_change);
    println!("  max deviation  {deviation:.3e}");
    println!(
        "  result         {} (tolerance {ORACLE_MATCH_TOL:e})",
        if pass { "PASS" } else { "FAIL" }
    );
    if pass {
        Ok(())
    } else {
        Err(CliError::Mismatch(format!(
            "max deviation {deviation:e} exceeds {ORACLE_MATCH_TOL:e}"
        )))
    }
}
