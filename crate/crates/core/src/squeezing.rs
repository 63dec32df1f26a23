//! Linearized quadrature statistics of a Kerr-squeezed pulse with Gaussian
//! phase noise. Variances are normalized so that vacuum gives 1.

use serde::{Deserialize, Serialize};

use crate::channel::{gaussian_params, ChannelGeometry, MediumParams};
use crate::error::{ensure_finite, KerrError, Result};
use crate::fock::CoherentAmplitude;
use crate::sweep::{
    grid2, map_points, sorted_axis, SweepMetadata, SweepParameter, SweepResult, TruncationPolicy,
};

/// Output intensity `zeta2`, squeezing parameter `r` and phase variance
/// `sigma2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SqueezingInput {
    pub zeta2: f64,
    pub r: f64,
    pub sigma2: f64,
}

impl SqueezingInput {
    pub fn new(zeta2: f64, r: f64, sigma2: f64) -> Result<Self> {
        for (name, v) in [("zeta2", zeta2), ("r", r), ("sigma2", sigma2)] {
            ensure_finite(name, v)?;
            if v < 0.0 {
                return Err(KerrError::invalid(name, "must be nonnegative"));
            }
        }
        Ok(SqueezingInput { zeta2, r, sigma2 })
    }

    /// Parameters after propagation of a coherent pulse with `n_bar` input
    /// photons: `zeta2 = tau n_bar`, `sinh r = 2 mu z zeta2`, and `sigma2`
    /// from the phase-diffusion model.
    pub fn from_physical(
        medium: &MediumParams,
        geom: &ChannelGeometry,
        n_bar: f64,
    ) -> Result<Self> {
        ensure_finite("n_bar", n_bar)?;
        if n_bar < 0.0 {
            return Err(KerrError::invalid("n_bar", "must be nonnegative"));
        }
        let input = CoherentAmplitude::from_mean_photon(n_bar, 0.0)?;
        let zeta2 = geom.tau() * n_bar;
        let sinh_r = 2.0 * geom.kerr_phase(medium) * zeta2;
        let sigma2 = gaussian_params(medium, geom, input).sigma2;
        SqueezingInput::new(zeta2, sinh_r.asinh(), sigma2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureStats {
    pub mean_q: f64,
    pub mean_p: f64,
    pub var_q: f64,
    pub var_p: f64,
    /// Symmetrized covariance of `q` and `p`.
    pub cov_qp: f64,
    pub theta_opt: f64,
    pub var_min: f64,
}

/// `(<cos phi>, <cos 2 phi>)` for zero-mean Gaussian `phi` of variance `sigma2`.
pub fn phase_moments(sigma2: f64) -> Result<(f64, f64)> {
    ensure_finite("sigma2", sigma2)?;
    if sigma2 < 0.0 {
        return Err(KerrError::invalid("sigma2", "must be nonnegative"));
    }
    Ok(((-0.5 * sigma2).exp(), (-2.0 * sigma2).exp()))
}

// u = e^{-sigma2}, w = 1 - u, s = sinh r.
struct Parts {
    u: f64,
    w: f64,
    s: f64,
    z2: f64,
}

impl Parts {
    fn of(input: &SqueezingInput) -> Self {
        Parts {
            u: (-input.sigma2).exp(),
            w: -(-input.sigma2).exp_m1(),
            s: input.r.sinh(),
            z2: input.zeta2,
        }
    }

    fn var_q(&self) -> f64 {
        1.0 + 2.0 * self.w * self.w * self.z2 + 2.0 * self.w * (1.0 + self.u) * self.s * self.s
    }

    fn var_p(&self) -> f64 {
        let u2 = self.u * self.u;
        1.0 + 2.0 * self.w * (1.0 + self.u) * self.z2 + 2.0 * (1.0 + u2) * self.s * self.s
    }

    fn cov(&self) -> f64 {
        2.0 * self.u * self.u * self.s
    }

    // var_q var_p - cov^2 expanded into nonnegative terms.
    fn det(&self) -> f64 {
        let Parts { u, w, s, z2 } = *self;
        let v = w * (1.0 + u);
        let s2 = s * s;
        1.0 + 2.0 * z2 * (v + w * w)
            + 4.0 * w * w * v * z2 * z2
            + 4.0 * z2 * s2 * (w * w * (1.0 + u * u) + v * v)
            + 4.0 * v * (1.0 + u * u) * s2 * (1.0 + s2)
    }

    fn larger_eigenvalue(&self) -> f64 {
        let Parts { u, w, s, z2 } = *self;
        let u2 = u * u;
        let inner = u2 * s * s + z2 * u * w;
        1.0 + 2.0 * z2 * w + 2.0 * s * s + 2.0 * (u2 * u2 * s * s + inner * inner).sqrt()
    }
}

/// Means, variances, covariance and the optimal quadrature.
pub fn quadrature_stats(input: &SqueezingInput) -> QuadratureStats {
    let parts = Parts::of(input);
    QuadratureStats {
        mean_q: 2.0 * input.zeta2.sqrt() * (-0.5 * input.sigma2).exp(),
        mean_p: 0.0,
        var_q: parts.var_q(),
        var_p: parts.var_p(),
        cov_qp: parts.cov(),
        theta_opt: optimal_angle(input),
        var_min: min_variance(input),
    }
}

/// Variance of `q cos theta + p sin theta`.
pub fn variance_at(input: &SqueezingInput, theta: f64) -> f64 {
    let parts = Parts::of(input);
    let (s, c) = theta.sin_cos();
    parts.var_q() * c * c + parts.var_p() * s * s + 2.0 * parts.cov() * s * c
}

/// Quadrature angle of least variance, in `(-pi/4, 0]`, from
/// `tan 2 theta = -sinh r / (sinh^2 r + zeta2 (e^sigma2 - 1))`.
pub fn optimal_angle(input: &SqueezingInput) -> f64 {
    let s = input.r.sinh();
    let den = s * s + input.zeta2 * input.sigma2.exp_m1();
    if s == 0.0 {
        return 0.0;
    }
    0.5 * (-s).atan2(den)
}

/// Smallest quadrature variance over all angles.
pub fn min_variance(input: &SqueezingInput) -> f64 {
    let parts = Parts::of(input);
    parts.det() / parts.larger_eigenvalue()
}

/// `g(tau) = [2 - tau - tau (1 - ln tau)^2] / (tau ln^2 tau)`, the excess
/// noise left by distributed loss. Tends to `(1 - tau)/3` as `tau -> 1`.
pub fn excess_noise_factor(tau: f64) -> Result<f64> {
    ensure_finite("tau", tau)?;
    if tau <= 0.0 || tau >= 1.0 {
        return Err(KerrError::invalid(
            "tau",
            format!("must lie in (0, 1), got {tau}"),
        ));
    }
    let y = -tau.ln();
    // 2 (e^y - 1 - y - y^2/2) / y^2 = 2 sum_{k>=3} y^(k-2) / k!
    if y < 1.0 {
        let mut term = 2.0 * y / 6.0;
        let mut sum = 0.0;
        let mut k = 3.0;
        while term > sum * 1e-17 {
            sum += term;
            k += 1.0;
            term *= y / k;
        }
        Ok(sum)
    } else {
        Ok(2.0 * (y.exp_m1() - y - 0.5 * y * y) / (y * y))
    }
}

/// `e^{-2r} + g(tau) (1 - e^{-2r}) tanh r`.
pub fn approx_min_variance(tau: f64, r: f64) -> Result<f64> {
    ensure_finite("r", r)?;
    if r < 0.0 {
        return Err(KerrError::invalid("r", "must be nonnegative"));
    }
    let g = excess_noise_factor(tau)?;
    Ok((-2.0 * r).exp() - g * (-2.0 * r).exp_m1() * r.tanh())
}

/// Attainable squeezing over `tau x kappa` for `n_bar` input photons.
/// Columns: `tau,kappa | sinh_r,var_min,plateau_estimate`.
pub fn squeezing_curve(
    n_bar: f64,
    taus: &[f64],
    kappas: &[f64],
    jobs: usize,
) -> Result<SweepResult> {
    ensure_finite("n_bar", n_bar)?;
    if n_bar <= 0.0 {
        return Err(KerrError::invalid("n_bar", "must be positive"));
    }
    let taus = sorted_axis("tau", taus)?;
    let kappas = sorted_axis("kappa", kappas)?;
    let mut result = SweepResult::new(
        "squeezing",
        vec![
            SweepParameter {
                name: "n_bar".into(),
                values: vec![n_bar],
            },
            SweepParameter {
                name: "tau".into(),
                values: taus.clone(),
            },
            SweepParameter {
                name: "kappa".into(),
                values: kappas.clone(),
            },
        ],
        &["tau", "kappa"],
        &["sinh_r", "var_min", "plateau_estimate"],
        SweepMetadata::new(&TruncationPolicy::default()),
    );
    let points = grid2(&taus, &kappas);
    let outcomes = map_points(&points, jobs, |&(tau, kappa)| {
        if !(tau > 0.0 && tau < 1.0) {
            return Err(KerrError::invalid(
                "tau",
                format!("must lie in (0, 1), got {tau}"),
            ));
        }
        if kappa < 0.0 {
            return Err(KerrError::invalid("kappa", "must be nonnegative"));
        }
        let medium = MediumParams::from_kappa(kappa)?;
        let geom = ChannelGeometry::from_transmission(&medium, tau)?;
        let input = SqueezingInput::from_physical(&medium, &geom, n_bar)?;
        Ok(vec![
            input.r.sinh(),
            min_variance(&input),
            (1.0 - tau) / 3.0,
        ])
    })?;
    for (&(tau, kappa), outcome) in points.iter().zip(outcomes) {
        result.push_outcome(vec![tau, kappa], outcome);
    }
    Ok(result)
}
