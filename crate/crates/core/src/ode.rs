//! Independent check of the closed-form channel output: classical RK4
//! integration of the interaction-picture master equation written out for
//! the Fock matrix elements,
//!
//! ```text
//! d rho_{mn}/dz = alpha/2 [ 2 rho_{m+1,n+1} sqrt((m+1)(n+1)) e^{2i mu z (m-n)}
//!                           - (m + n) rho_{mn} ]
//! ```
//!
//! Loss moves weight from `(m+1, n+1)` down to `(m, n)`, so the rows near the
//! cutoff are corrupted by truncation. Integration therefore runs on a larger
//! space and the result is cut back afterwards.

use num_complex::Complex64;

use crate::channel::MediumParams;
use crate::error::{ensure_finite, KerrError, Result};
use crate::fock::{truncation_dimension, CoherentAmplitude, DensityOperator, FockDim};

/// Extra Fock levels carried above the output cutoff during integration.
pub const HEADROOM: usize = 20;

/// Largest elementwise change tolerated when the step count is doubled.
pub const DEFAULT_ODE_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct OracleRun {
    pub state: DensityOperator,
    /// Step count of the returned (finer) integration.
    pub steps: usize,
    /// Largest elementwise change between `steps / 2` and `steps`.
    pub max_change: f64,
}

struct Integrator {
    size: usize,
    half_alpha: f64,
    two_mu: f64,
    /// sqrt((m+1)(n+1)) stored row-major.
    feed: Vec<f64>,
}

impl Integrator {
    fn new(medium: &MediumParams, size: usize) -> Self {
        let mut feed = vec![0.0; size * size];
        for m in 0..size {
            for n in 0..size {
                feed[m * size + n] = (((m + 1) * (n + 1)) as f64).sqrt();
            }
        }
        Integrator {
            size,
            half_alpha: 0.5 * medium.alpha(),
            two_mu: 2.0 * medium.mu(),
            feed,
        }
    }

    fn rhs(&self, z: f64, rho: &[Complex64], out: &mut [Complex64]) {
        let n = self.size;
        // e^{2i mu z j} for j = m - n in -(n-1)..=(n-1), offset by n - 1.
        let phases: Vec<Complex64> = (0..2 * n - 1)
            .map(|k| Complex64::from_polar(1.0, self.two_mu * z * (k as f64 - (n - 1) as f64)))
            .collect();
        for m in 0..n {
            for k in 0..n {
                let idx = m * n + k;
                let decay = rho[idx] * ((m + k) as f64);
                let gain = if m + 1 < n && k + 1 < n {
                    rho[(m + 1) * n + k + 1] * (2.0 * self.feed[idx]) * phases[m + n - 1 - k]
                } else {
                    Complex64::new(0.0, 0.0)
                };
                out[idx] = (gain - decay) * self.half_alpha;
            }
        }
    }

    fn run(&self, initial: &[Complex64], z_final: f64, steps: usize) -> Vec<Complex64> {
        let len = initial.len();
        let h = z_final / steps as f64;
        let mut y = initial.to_vec();
        let mut k1 = vec![Complex64::new(0.0, 0.0); len];
        let mut k2 = k1.clone();
        let mut k3 = k1.clone();
        let mut k4 = k1.clone();
        let mut tmp = k1.clone();
        for step in 0..steps {
            let z = step as f64 * h;
            self.rhs(z, &y, &mut k1);
            for i in 0..len {
                tmp[i] = y[i] + k1[i] * (0.5 * h);
            }
            self.rhs(z + 0.5 * h, &tmp, &mut k2);
            for i in 0..len {
                tmp[i] = y[i] + k2[i] * (0.5 * h);
            }
            self.rhs(z + 0.5 * h, &tmp, &mut k3);
            for i in 0..len {
                tmp[i] = y[i] + k3[i] * h;
            }
            self.rhs(z + h, &tmp, &mut k4);
            for i in 0..len {
                y[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (h / 6.0);
            }
        }
        y
    }
}

fn setup(
    medium: &MediumParams,
    z_final: f64,
    input: CoherentAmplitude,
    dim: FockDim,
) -> Result<(Integrator, Vec<Complex64>)> {
    ensure_finite("z_final", z_final)?;
    if z_final < 0.0 {
        return Err(KerrError::invalid("z_final", "must be nonnegative"));
    }
    let input_dim = truncation_dimension(input.mean_photon_number(), dim.tail_tol())?;
    let size = dim.size().max(input_dim.size()) + HEADROOM;
    let psi = crate::fock::coherent_components(input.value(), size);
    let mut rho0 = vec![Complex64::new(0.0, 0.0); size * size];
    for m in 0..size {
        for n in 0..size {
            rho0[m * size + n] = psi[m] * psi[n].conj();
        }
    }
    Ok((Integrator::new(medium, size), rho0))
}

fn cut(y: &[Complex64], size: usize, dim: FockDim) -> DensityOperator {
    let elements = faer::Mat::from_fn(dim.size(), dim.size(), |m, n| y[m * size + n]);
    DensityOperator::from_parts(dim, elements)
}

fn max_change(a: &[Complex64], b: &[Complex64], size: usize, keep: usize) -> f64 {
    let mut worst = 0.0f64;
    for m in 0..keep {
        for n in 0..keep {
            let d = (a[m * size + n] - b[m * size + n]).norm();
            if !d.is_finite() {
                return f64::INFINITY;
            }
            worst = worst.max(d);
        }
    }
    worst
}

/// Integrates with exactly `steps` RK4 steps, returning the truncated state.
pub fn integrate_rk4(
    medium: &MediumParams,
    z_final: f64,
    input: CoherentAmplitude,
    dim: FockDim,
    steps: usize,
) -> Result<DensityOperator> {
    if steps == 0 {
        return Err(KerrError::invalid("steps", "must be positive"));
    }
    let (integrator, rho0) = setup(medium, z_final, input, dim)?;
    let y = integrator.run(&rho0, z_final, steps);
    Ok(cut(&y, integrator.size, dim))
}

/// Integrates with `steps` and `2 * steps` and fails with
/// [`KerrError::NotConverged`] if any retained element moved by more than
/// [`DEFAULT_ODE_TOL`].
pub fn ode_oracle_integrate(
    medium: &MediumParams,
    z_final: f64,
    input: CoherentAmplitude,
    dim: FockDim,
    steps: usize,
) -> Result<OracleRun> {
    ode_oracle_with_tol(medium, z_final, input, dim, steps, DEFAULT_ODE_TOL)
}

pub fn ode_oracle_with_tol(
    medium: &MediumParams,
    z_final: f64,
    input: CoherentAmplitude,
    dim: FockDim,
    steps: usize,
    tol: f64,
) -> Result<OracleRun> {
    if steps == 0 {
        return Err(KerrError::invalid("steps", "must be positive"));
    }
    let (integrator, rho0) = setup(medium, z_final, input, dim)?;
    let coarse = integrator.run(&rho0, z_final, steps);
    let fine = integrator.run(&rho0, z_final, 2 * steps);
    let change = max_change(&coarse, &fine, integrator.size, dim.size());
    if change > tol {
        return Err(KerrError::NotConverged {
            steps: 2 * steps,
            max_change: change,
            tolerance: tol,
        });
    }
    Ok(OracleRun {
        state: cut(&fine, integrator.size, dim),
        steps: 2 * steps,
        max_change: change,
    })
}

/// Doubles the step count, starting from `initial_steps`, until successive
/// results agree to `tol`; gives up after `max_doublings` doublings.
pub fn ode_oracle_converged(
    medium: &MediumParams,
    z_final: f64,
    input: CoherentAmplitude,
    dim: FockDim,
    initial_steps: usize,
    max_doublings: u32,
    tol: f64,
) -> Result<OracleRun> {
    if initial_steps == 0 {
        return Err(KerrError::invalid("initial_steps", "must be positive"));
    }
    let (integrator, rho0) = setup(medium, z_final, input, dim)?;
    let mut steps = initial_steps;
    let mut prev = integrator.run(&rho0, z_final, steps);
    let mut change = f64::INFINITY;
    for _ in 0..max_doublings {
        steps *= 2;
        let next = integrator.run(&rho0, z_final, steps);
        change = max_change(&prev, &next, integrator.size, dim.size());
        prev = next;
        if change <= tol {
            return Ok(OracleRun {
                state: cut(&prev, integrator.size, dim),
                steps,
                max_change: change,
            });
        }
    }
    Err(KerrError::NotConverged {
        steps,
        max_change: change,
        tolerance: tol,
    })
}
