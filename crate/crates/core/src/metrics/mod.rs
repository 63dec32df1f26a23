//! State functionals: entropies, fidelity, and the Holevo quantity of the
//! continuous phase-keyed ring constellation.

mod husimi;

pub use husimi::{husimi_q, GridSpec, QGrid};

use serde::{Deserialize, Serialize};

use crate::channel::{
    exact_output_state, gaussian_params, phase_diffused_state, ChannelGeometry, MediumParams,
};
use crate::error::{ensure_finite, KerrError, Result};
use crate::fock::{poisson_ln_pmf, truncation_dimension, CoherentAmplitude, DensityOperator};
use crate::linalg;
use crate::sweep::{
    grid2, map_points, sorted_axis, SweepMetadata, SweepParameter, SweepResult, TruncationPolicy,
};

/// Logarithm base for entropies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum LogBase {
    #[default]
    Bits,
    Nats,
}

impl LogBase {
    fn scale(self) -> f64 {
        match self {
            LogBase::Bits => std::f64::consts::LOG2_E,
            LogBase::Nats => 1.0,
        }
    }

    pub fn unit(self) -> &'static str {
        match self {
            LogBase::Bits => "bits",
            LogBase::Nats => "nats",
        }
    }
}

/// Largest output intensity accepted by [`holevo_ring`]; the member-state
/// eigendecomposition grows as the cube of the cutoff.
pub const MAX_HOLEVO_TAU_NBAR: f64 = 2000.0;

// Tail mass discarded when summing the Poisson entropy.
const POISSON_ENTROPY_TAIL: f64 = 1e-15;

/// `-Tr rho log rho`.
///
/// Rows whose populations sum to less than the state's tail tolerance are
/// dropped from both ends of the Fock ladder before diagonalizing; their
/// contribution is of the order of that tolerance.
pub fn von_neumann_entropy(rho: &DensityOperator, base: LogBase) -> Result<f64> {
    let window = linalg::support_window(&rho.populations(), rho.dim().tail_tol());
    let len = window.len();
    let block = rho.matrix().submatrix(window.start, window.start, len, len);
    let eigenvalues = linalg::hermitian_eigenvalues(block)?;
    let nats: f64 = eigenvalues
        .into_iter()
        .map(|l| l.clamp(0.0, 1.0))
        .filter(|&l| l > 0.0)
        .map(|l| -l * l.ln())
        .sum();
    Ok((nats * base.scale()).max(0.0))
}

/// Shannon entropy of a Poisson distribution.
pub fn poisson_entropy(mean: f64, base: LogBase) -> Result<f64> {
    ensure_finite("mean", mean)?;
    if mean < 0.0 {
        return Err(KerrError::invalid("mean", "must be nonnegative"));
    }
    if mean == 0.0 {
        return Ok(0.0);
    }
    let dim = truncation_dimension(mean, POISSON_ENTROPY_TAIL)?;
    let nats: f64 = (0..dim.size())
        .map(|k| {
            let lp = poisson_ln_pmf(mean, k);
            -lp.exp() * lp
        })
        .sum();
    Ok(nats * base.scale())
}

/// Uhlmann fidelity `Tr sqrt(sqrt(rho) sigma sqrt(rho))`, evaluated as the
/// trace norm of `sqrt(rho) sqrt(sigma)` so that nearly pure states keep full
/// relative accuracy. Fock levels where both states together hold less than
/// the smaller tail tolerance are left out.
pub fn uhlmann_fidelity(rho: &DensityOperator, sigma: &DensityOperator) -> Result<f64> {
    if rho.size() != sigma.size() {
        return Err(KerrError::DimensionMismatch {
            left: rho.size(),
            right: sigma.size(),
        });
    }
    let tol = rho.dim().tail_tol().min(sigma.dim().tail_tol());
    let (pr, ps) = (rho.populations(), sigma.populations());
    let combined: Vec<f64> = pr.iter().zip(&ps).map(|(a, b)| a.max(*b)).collect();
    let window = linalg::support_window(&combined, tol);
    let (lo, len) = (window.start, window.len());
    let a = linalg::psd_sqrt(rho.matrix().submatrix(lo, lo, len, len))?;
    let b = linalg::psd_sqrt(sigma.matrix().submatrix(lo, lo, len, len))?;
    linalg::nuclear_norm((&a * &b).as_ref())
}

/// Input amplitude (real, positive) producing `tau_nbar` output photons.
fn input_for(geom: &ChannelGeometry, tau_nbar: f64) -> Result<CoherentAmplitude> {
    ensure_finite("tau_nbar", tau_nbar)?;
    if tau_nbar < 0.0 {
        return Err(KerrError::invalid("tau_nbar", "must be nonnegative"));
    }
    CoherentAmplitude::from_mean_photon(tau_nbar / geom.tau(), 0.0)
}

/// `1 - F` between the exact channel output and its Gaussian phase-diffusion
/// approximation.
pub fn gaussian_infidelity(
    medium: &MediumParams,
    geom: &ChannelGeometry,
    tau_nbar: f64,
    policy: &TruncationPolicy,
) -> Result<f64> {
    let input = input_for(geom, tau_nbar)?;
    let dim = policy.dim_for(tau_nbar)?;
    let exact = exact_output_state(medium, geom, input, dim)?;
    let noise = gaussian_params(medium, geom, input);
    let approx = phase_diffused_state(input.scaled(geom.tau().sqrt()), noise, dim)?;
    let f = uhlmann_fidelity(&exact, &approx)?;
    Ok((1.0 - f).clamp(0.0, 1.0))
}

/// Infidelity heat map over `kappa x tau_nbar` at fixed transmission.
/// Columns: `kappa,tau_nbar | one_minus_f`.
pub fn infidelity_map(
    kappas: &[f64],
    tau: f64,
    tau_nbars: &[f64],
    policy: &TruncationPolicy,
    jobs: usize,
) -> Result<SweepResult> {
    let kappas = sorted_axis("kappa", kappas)?;
    let tau_nbars = sorted_axis("tau_nbar", tau_nbars)?;
    if kappas.iter().chain(&tau_nbars).any(|&v| v < 0.0) {
        return Err(KerrError::invalid(
            "grid",
            "kappa and tau_nbar must be nonnegative",
        ));
    }
    // Validate the fixed transmission up front so it fails the whole sweep.
    ChannelGeometry::from_transmission(&MediumParams::from_kappa(0.0)?, tau)?;
    let mut result = SweepResult::new(
        "infidelity",
        vec![
            SweepParameter {
                name: "tau".into(),
                values: vec![tau],
            },
            SweepParameter {
                name: "kappa".into(),
                values: kappas.clone(),
            },
            SweepParameter {
                name: "tau_nbar".into(),
                values: tau_nbars.clone(),
            },
        ],
        &["kappa", "tau_nbar"],
        &["one_minus_f"],
        SweepMetadata::new(policy),
    );
    let points = grid2(&kappas, &tau_nbars);
    let outcomes = map_points(&points, jobs, |&(kappa, tn)| {
        let medium = MediumParams::from_kappa(kappa)?;
        let geom = ChannelGeometry::from_transmission(&medium, tau)?;
        gaussian_infidelity(&medium, &geom, tn, policy).map(|v| vec![v])
    })?;
    for (&(kappa, tn), outcome) in points.iter().zip(outcomes) {
        result.push_outcome(vec![kappa, tn], outcome);
    }
    Ok(result)
}

/// Which member state enters the Holevo quantity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum HolevoVariant {
    Gaussian,
    Exact,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HolevoPoint {
    pub tau_nbar: f64,
    pub chi: f64,
    pub entropy_avg_state: f64,
    pub entropy_member_state: f64,
}

/// Holevo quantity of coherent states spread uniformly over a ring.
///
/// Averaging over the uniform phase erases every off-diagonal element, so
/// the average output is the Poisson mixture of Fock states and its entropy
/// is the Shannon entropy of Poisson(`tau_nbar`). All members are related by
/// phase rotations and share one entropy.
pub fn holevo_ring(
    medium: &MediumParams,
    geom: &ChannelGeometry,
    tau_nbar: f64,
    variant: HolevoVariant,
    base: LogBase,
    policy: &TruncationPolicy,
) -> Result<HolevoPoint> {
    let input = input_for(geom, tau_nbar)?;
    if tau_nbar > MAX_HOLEVO_TAU_NBAR {
        return Err(KerrError::invalid(
            "tau_nbar",
            format!("above the supported maximum {MAX_HOLEVO_TAU_NBAR}"),
        ));
    }
    let dim = policy.dim_for(tau_nbar)?;
    let member = match variant {
        HolevoVariant::Exact => exact_output_state(medium, geom, input, dim)?,
        HolevoVariant::Gaussian => {
            let noise = gaussian_params(medium, geom, input);
            phase_diffused_state(input.scaled(geom.tau().sqrt()), noise, dim)?
        }
    };
    let entropy_avg_state = poisson_entropy(tau_nbar, base)?;
    let entropy_member_state = von_neumann_entropy(&member, base)?;
    Ok(HolevoPoint {
        tau_nbar,
        chi: (entropy_avg_state - entropy_member_state).max(0.0),
        entropy_avg_state,
        entropy_member_state,
    })
}

/// Holevo curves over `kappa x tau_nbar` at fixed transmission.
/// Columns: `kappa,tau_nbar | chi_<unit>,S_avg,S_member`.
pub fn holevo_curves(
    kappas: &[f64],
    tau: f64,
    tau_nbars: &[f64],
    variant: HolevoVariant,
    base: LogBase,
    policy: &TruncationPolicy,
    jobs: usize,
) -> Result<SweepResult> {
    let kappas = sorted_axis("kappa", kappas)?;
    let tau_nbars = sorted_axis("tau_nbar", tau_nbars)?;
    if kappas.iter().chain(&tau_nbars).any(|&v| v < 0.0) {
        return Err(KerrError::invalid(
            "grid",
            "kappa and tau_nbar must be nonnegative",
        ));
    }
    ChannelGeometry::from_transmission(&MediumParams::from_kappa(0.0)?, tau)?;
    let chi_column = match base {
        LogBase::Bits => "chi_bits",
        LogBase::Nats => "chi_nats",
    };
    let mut metadata = SweepMetadata::new(policy);
    metadata.log_base = Some(base.unit().to_string());
    let mut result = SweepResult::new(
        "holevo",
        vec![
            SweepParameter {
                name: "tau".into(),
                values: vec![tau],
            },
            SweepParameter {
                name: "kappa".into(),
                values: kappas.clone(),
            },
            SweepParameter {
                name: "tau_nbar".into(),
                values: tau_nbars.clone(),
            },
        ],
        &["kappa", "tau_nbar"],
        &[chi_column, "S_avg", "S_member"],
        metadata,
    );
    let points = grid2(&kappas, &tau_nbars);
    let outcomes = map_points(&points, jobs, |&(kappa, tn)| {
        let medium = MediumParams::from_kappa(kappa)?;
        let geom = ChannelGeometry::from_transmission(&medium, tau)?;
        holevo_ring(&medium, &geom, tn, variant, base, policy)
            .map(|p| vec![p.chi, p.entropy_avg_state, p.entropy_member_state])
    })?;
    for (&(kappa, tn), outcome) in points.iter().zip(outcomes) {
        result.push_outcome(vec![kappa, tn], outcome);
    }
    Ok(result)
}
