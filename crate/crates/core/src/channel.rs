//! Lossy Kerr channel acting on a coherent input.
//!
//! All states produced here live in the interaction picture of the Kerr
//! Hamiltonian: the unitary factor `exp(i mu z n^2)` is left out. Use
//! [`DensityOperator::with_kerr_phase`] with [`ChannelGeometry::kerr_phase`]
//! to recover the laboratory-frame state.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, KerrError, Result};
use crate::fock::{coherent_state_vector, CoherentAmplitude, DensityOperator, FockDim};

/// Loss coefficient `alpha` and Kerr strength `mu`, both per unit length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MediumParams {
    alpha: f64,
    mu: f64,
}

impl MediumParams {
    pub fn new(alpha: f64, mu: f64) -> Result<Self> {
        ensure_finite("alpha", alpha)?;
        ensure_finite("mu", mu)?;
        if alpha <= 0.0 {
            return Err(KerrError::invalid("alpha", "must be positive"));
        }
        if mu < 0.0 {
            return Err(KerrError::invalid("mu", "must be nonnegative"));
        }
        Ok(MediumParams { alpha, mu })
    }

    /// Medium with unit loss coefficient and `mu = kappa`.
    pub fn from_kappa(kappa: f64) -> Result<Self> {
        Self::new(1.0, kappa)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// Dimensionless nonlinearity `mu / alpha`.
    pub fn kappa(&self) -> f64 {
        self.mu / self.alpha
    }
}

/// Propagation distance and the resulting power transmission.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelGeometry {
    z: f64,
    tau: f64,
}

impl ChannelGeometry {
    pub fn from_length(medium: &MediumParams, z: f64) -> Result<Self> {
        ensure_finite("z", z)?;
        if z < 0.0 {
            return Err(KerrError::invalid("z", "must be nonnegative"));
        }
        let tau = (-medium.alpha * z).exp();
        if tau <= 0.0 {
            return Err(KerrError::invalid("z", "transmission underflows to zero"));
        }
        Ok(ChannelGeometry { z, tau })
    }

    pub fn from_transmission(medium: &MediumParams, tau: f64) -> Result<Self> {
        check_tau(tau)?;
        Ok(ChannelGeometry {
            z: -tau.ln() / medium.alpha,
            tau,
        })
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// Kerr phase per `n^2` accumulated over the channel, `mu z`.
    pub fn kerr_phase(&self, medium: &MediumParams) -> f64 {
        medium.mu * self.z
    }
}

fn check_tau(tau: f64) -> Result<()> {
    ensure_finite("tau", tau)?;
    if tau <= 0.0 || tau > 1.0 {
        return Err(KerrError::invalid(
            "tau",
            format!("must lie in (0, 1], got {tau}"),
        ));
    }
    Ok(())
}

/// Mean shift and variance of the Gaussian phase noise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseDiffusionParams {
    pub phi0: f64,
    pub sigma2: f64,
}

impl PhaseDiffusionParams {
    pub fn new(phi0: f64, sigma2: f64) -> Result<Self> {
        ensure_finite("phi0", phi0)?;
        ensure_finite("sigma2", sigma2)?;
        if sigma2 < 0.0 {
            return Err(KerrError::invalid("sigma2", "must be nonnegative"));
        }
        Ok(PhaseDiffusionParams { phi0, sigma2 })
    }
}

/// Fibre and pulse data. Any consistent unit system works as long as
/// `gamma_nl * photon_energy / (alpha * pulse_duration)` is dimensionless,
/// e.g. km^-1 W^-1, J, km^-1 and s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FiberSpec {
    pub gamma_nl: f64,
    pub photon_energy: f64,
    pub alpha: f64,
    pub pulse_duration: f64,
}

pub fn dimensionless_nonlinearity(fiber: &FiberSpec) -> Result<f64> {
    for (name, v) in [
        ("gamma_nl", fiber.gamma_nl),
        ("photon_energy", fiber.photon_energy),
        ("alpha", fiber.alpha),
        ("pulse_duration", fiber.pulse_duration),
    ] {
        ensure_finite(name, v)?;
        if v <= 0.0 {
            return Err(KerrError::invalid(name, "must be positive"));
        }
    }
    Ok(fiber.gamma_nl * fiber.photon_energy / (fiber.alpha * fiber.pulse_duration))
}

/// `P(K >= k0)` for `K ~ Poisson(x)`, accurate for small `x`.
fn poisson_upper(x: f64, k0: u32) -> f64 {
    if x < 1.0 {
        let mut term = (-x).exp();
        for k in 1..=k0 {
            term *= x / k as f64;
        }
        let mut sum = 0.0;
        let mut k = k0;
        while term > sum * 1e-18 && term > 0.0 {
            sum += term;
            k += 1;
            term *= x / k as f64;
        }
        sum
    } else {
        let mut term = 1.0;
        let mut head = 0.0;
        for k in 0..k0 {
            if k > 0 {
                term *= x / k as f64;
            }
            head += term;
        }
        1.0 - (-x).exp() * head
    }
}

/// `1 - tau + tau ln tau`, the coefficient of the deterministic phase shift.
pub fn phase_shift_coefficient(tau: f64) -> Result<f64> {
    check_tau(tau)?;
    Ok(poisson_upper(-tau.ln(), 2))
}

/// `2 - tau - tau (1 - ln tau)^2`, the coefficient of the phase variance.
pub fn phase_noise_coefficient(tau: f64) -> Result<f64> {
    check_tau(tau)?;
    Ok(2.0 * poisson_upper(-tau.ln(), 3))
}

/// `f_tau(x) = 1 - tau - (1 - tau^(1 - 2ix)) / (1 - 2ix)`.
///
/// Evaluated as `tau (e^{i theta} - 1) - 2ix (1 - tau^(1-2ix)) / (1 - 2ix)`
/// with `theta = -2x ln tau`, which has no cancellation for small `x`.
pub fn f_tau(tau: f64, x: f64) -> Result<Complex64> {
    check_tau(tau)?;
    ensure_finite("kappa_arg", x)?;
    Ok(f_tau_unchecked(tau, x))
}

pub(crate) fn f_tau_unchecked(tau: f64, x: f64) -> Complex64 {
    let theta = -2.0 * x * tau.ln();
    let (s, c) = theta.sin_cos();
    let half = (0.5 * theta).sin();
    let rotated_minus_one = Complex64::new(-2.0 * half * half, s);
    let tau_pow = Complex64::new(tau * c, tau * s);
    let a = Complex64::new(1.0, -2.0 * x);
    let two_ix = Complex64::new(0.0, 2.0 * x);
    rotated_minus_one * tau - two_ix * (Complex64::new(1.0, 0.0) - tau_pow) / a
}

/// Second-order expansion of [`f_tau`] around zero:
/// `-2i (1 - tau + tau ln tau) x + [4 - 2 tau - 2 tau (1 - ln tau)^2] x^2`.
pub fn f_tau_quadratic(tau: f64, x: f64) -> Result<Complex64> {
    ensure_finite("kappa_arg", x)?;
    let linear = phase_shift_coefficient(tau)?;
    let quadratic = 2.0 * phase_noise_coefficient(tau)?;
    Ok(Complex64::new(quadratic * x * x, -2.0 * linear * x))
}

/// Phase shift `phi0 = 2 kappa nbar (1 - tau + tau ln tau)` and variance
/// `sigma2 = 4 kappa^2 nbar [2 - tau - tau (1 - ln tau)^2]`.
pub fn gaussian_params(
    medium: &MediumParams,
    geom: &ChannelGeometry,
    input: CoherentAmplitude,
) -> PhaseDiffusionParams {
    let kappa = medium.kappa();
    let nbar = input.mean_photon_number();
    // Both coefficients are finite for the validated tau of a geometry.
    let shift = poisson_upper(-geom.tau.ln(), 2);
    let noise = 2.0 * poisson_upper(-geom.tau.ln(), 3);
    PhaseDiffusionParams {
        phi0: 2.0 * kappa * nbar * shift,
        sigma2: 4.0 * kappa * kappa * nbar * noise,
    }
}

/// Output state `rho'_{mn} = <m|sqrt(tau) z0><sqrt(tau) z0|n> exp[-nbar f_tau((m-n) kappa)]`.
pub fn exact_output_state(
    medium: &MediumParams,
    geom: &ChannelGeometry,
    input: CoherentAmplitude,
    dim: FockDim,
) -> Result<DensityOperator> {
    let attenuated = input.scaled(geom.tau.sqrt());
    let psi = coherent_state_vector(attenuated, dim)?;
    let nbar = input.mean_photon_number();
    let kappa = medium.kappa();
    // Depends only on m - n; f_tau(-x) = conj f_tau(x) covers negative offsets.
    let damping: Vec<Complex64> = (0..dim.size())
        .map(|j| (-nbar * f_tau_unchecked(geom.tau, j as f64 * kappa)).exp())
        .collect();
    Ok(toeplitz_modulated(&psi, &damping, dim))
}

/// Gaussian phase mixture of coherent states,
/// `rho_{mn} = <m|z><z|n> exp[i (m-n) phi0 - (m-n)^2 sigma2 / 2]`.
pub fn phase_diffused_state(
    zeta: CoherentAmplitude,
    noise: PhaseDiffusionParams,
    dim: FockDim,
) -> Result<DensityOperator> {
    let psi = coherent_state_vector(zeta, dim)?;
    let factors: Vec<Complex64> = (0..dim.size())
        .map(|j| {
            let j = j as f64;
            Complex64::from_polar((-0.5 * j * j * noise.sigma2).exp(), j * noise.phi0)
        })
        .collect();
    Ok(toeplitz_modulated(&psi, &factors, dim))
}

/// `rho_{mn} = psi_m conj(psi_n) d_{m-n}` with `d_{-j} = conj(d_j)`.
fn toeplitz_modulated(psi: &[Complex64], d: &[Complex64], dim: FockDim) -> DensityOperator {
    let n = dim.size();
    let elements = faer::Mat::from_fn(n, n, |m, k| {
        let factor = if m >= k { d[m - k] } else { d[k - m].conj() };
        psi[m] * psi[k].conj() * factor
    });
    DensityOperator::from_parts(dim, elements)
}

/// Separation-of-variables solution for the off-diagonal factor,
/// `c_j(z) = exp(-nbar tau tau^(-2i kappa j) / (1 - 2i kappa j) + A0)` with
/// `A0` fixed by `c_j(0) = exp(-nbar)`.
pub fn c_factor(medium: &MediumParams, geom: &ChannelGeometry, n_bar: f64, j: i64) -> Complex64 {
    let x = medium.kappa() * j as f64;
    let a = Complex64::new(1.0, -2.0 * x);
    let rotation = Complex64::from_polar(1.0, -2.0 * x * geom.tau.ln());
    let a0 = Complex64::new(n_bar, 0.0) / a - n_bar;
    (-(rotation * (n_bar * geom.tau)) / a + a0).exp()
}

/// The `j`-independent factor relating [`c_factor`] to `exp(-nbar f_tau(j kappa))`.
pub fn c_factor_normalization(geom: &ChannelGeometry, n_bar: f64) -> f64 {
    (-n_bar * geom.tau).exp()
}
