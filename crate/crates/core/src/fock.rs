//! Truncated single-mode Fock space: coherent amplitudes, Poisson photon
//! statistics and density operators.

use faer::{Mat, MatRef};
use num_complex::Complex64;

use crate::error::{ensure_finite, KerrError, Result};
use crate::linalg;

/// Default bound on the Poisson mass discarded by a Fock cutoff.
pub const DEFAULT_TAIL_TOL: f64 = 1e-12;

/// Smallest cutoff ever produced by [`truncation_dimension`].
pub const MIN_N_MAX: usize = 29;

const HERMITICITY_TOL: f64 = 1e-12;
const PSD_TOL: f64 = -1e-10;
// Trace errors come from the discarded tail plus summation round-off.
const TRACE_ROUNDOFF: f64 = 1e-13;

/// Highest retained Fock index together with the tail tolerance it was
/// chosen for. The matrix dimension is `n_max + 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FockDim {
    n_max: usize,
    tail_tol: f64,
}

impl FockDim {
    pub fn new(n_max: usize) -> Result<Self> {
        Self::with_tail_tol(n_max, DEFAULT_TAIL_TOL)
    }

    pub fn with_tail_tol(n_max: usize, tail_tol: f64) -> Result<Self> {
        if n_max < 1 {
            return Err(KerrError::invalid("n_max", "must be at least 1"));
        }
        check_tail_tol(tail_tol)?;
        Ok(FockDim { n_max, tail_tol })
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// Matrix dimension, `n_max + 1`.
    pub fn size(&self) -> usize {
        self.n_max + 1
    }

    pub fn tail_tol(&self) -> f64 {
        self.tail_tol
    }

    /// Fails unless the Poisson tail of `mean` beyond this cutoff is below
    /// the tail tolerance.
    pub fn check_covers(&self, mean: f64) -> Result<()> {
        let tail = poisson_tail(mean, self.n_max);
        if tail < self.tail_tol {
            Ok(())
        } else {
            Err(KerrError::DimensionTooSmall {
                n_max: self.n_max,
                mean,
                tail,
                tail_tol: self.tail_tol,
            })
        }
    }
}

fn check_tail_tol(tail_tol: f64) -> Result<()> {
    ensure_finite("tail_tol", tail_tol)?;
    if tail_tol <= 0.0 || tail_tol > 1e-3 {
        return Err(KerrError::invalid(
            "tail_tol",
            format!("must lie in (0, 1e-3], got {tail_tol}"),
        ));
    }
    Ok(())
}

/// Complex field amplitude of a coherent state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherentAmplitude {
    value: Complex64,
}

impl CoherentAmplitude {
    pub fn new(value: Complex64) -> Result<Self> {
        ensure_finite("amplitude.re", value.re)?;
        ensure_finite("amplitude.im", value.im)?;
        Ok(CoherentAmplitude { value })
    }

    pub fn real(value: f64) -> Result<Self> {
        Self::new(Complex64::new(value, 0.0))
    }

    /// Amplitude `sqrt(mean) * exp(i phase)`.
    pub fn from_mean_photon(mean: f64, phase: f64) -> Result<Self> {
        ensure_finite("mean_photon", mean)?;
        if mean < 0.0 {
            return Err(KerrError::invalid("mean_photon", "must be nonnegative"));
        }
        Self::new(Complex64::from_polar(mean.sqrt(), phase))
    }

    pub fn value(&self) -> Complex64 {
        self.value
    }

    pub fn mean_photon_number(&self) -> f64 {
        self.value.norm_sqr()
    }

    /// Amplitude scaled by a real factor, e.g. `sqrt(tau)` for attenuation.
    pub fn scaled(&self, factor: f64) -> Self {
        CoherentAmplitude {
            value: self.value * factor,
        }
    }

    /// Amplitude rotated by `phase` radians.
    pub fn rotated(&self, phase: f64) -> Self {
        CoherentAmplitude {
            value: self.value * Complex64::from_polar(1.0, phase),
        }
    }
}

pub(crate) fn ln_factorial(k: usize) -> f64 {
    libm::lgamma(k as f64 + 1.0)
}

/// Natural log of the Poisson probability of `k` for the given mean.
pub(crate) fn poisson_ln_pmf(mean: f64, k: usize) -> f64 {
    if mean == 0.0 {
        return if k == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    -mean + k as f64 * mean.ln() - ln_factorial(k)
}

/// Probability that a Poisson variable with the given mean exceeds `n_max`,
/// summed term by term (no `1 - cdf` cancellation).
pub fn poisson_tail(mean: f64, n_max: usize) -> f64 {
    if mean <= 0.0 {
        return 0.0;
    }
    let mut k = n_max + 1;
    let mut term = poisson_ln_pmf(mean, k).exp();
    let mut sum = 0.0;
    loop {
        sum += term;
        let past_mode = k as f64 > mean;
        if past_mode && (term == 0.0 || term < sum * 1e-17) {
            break;
        }
        k += 1;
        term *= mean / k as f64;
        // A term that underflowed before the mode must be recomputed once it
        // can be represented again.
        if term == 0.0 && !past_mode {
            term = poisson_ln_pmf(mean, k).exp();
        }
    }
    sum
}

/// Smallest cutoff `n_max >= max(29, ceil(mean + 10 sqrt(mean)))` whose
/// Poisson tail is below `tail_tol`.
pub fn truncation_dimension(mean_photon: f64, tail_tol: f64) -> Result<FockDim> {
    ensure_finite("mean_photon", mean_photon)?;
    if mean_photon < 0.0 {
        return Err(KerrError::invalid("mean_photon", "must be nonnegative"));
    }
    check_tail_tol(tail_tol)?;
    let floor = (mean_photon + 10.0 * mean_photon.sqrt()).ceil() as usize;
    let mut n_max = floor.max(MIN_N_MAX);
    while poisson_tail(mean_photon, n_max) >= tail_tol {
        n_max += 1;
    }
    FockDim::with_tail_tol(n_max, tail_tol)
}

/// Fock components of a coherent state without any normalization check.
/// Used where the state is only needed on a fixed support, e.g. as a probe
/// vector for phase-space functions.
pub(crate) fn coherent_components(zeta: Complex64, size: usize) -> Vec<Complex64> {
    let mean = zeta.norm_sqr();
    let phase = zeta.arg();
    (0..size)
        .map(|k| {
            let modulus = (0.5 * poisson_ln_pmf(mean, k)).exp();
            Complex64::from_polar(modulus, k as f64 * phase)
        })
        .collect()
}

/// Components `<k|zeta> = exp(-|zeta|^2/2) zeta^k / sqrt(k!)` for
/// `k = 0..=n_max`.
pub fn coherent_state_vector(zeta: CoherentAmplitude, dim: FockDim) -> Result<Vec<Complex64>> {
    dim.check_covers(zeta.mean_photon_number())?;
    Ok(coherent_components(zeta.value(), dim.size()))
}

/// Poisson probabilities on `0..=n_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct PoissonWeights {
    pub mean: f64,
    pub weights: Vec<f64>,
}

impl PoissonWeights {
    pub fn total(&self) -> f64 {
        self.weights.iter().sum()
    }
}

pub fn poisson_weights(mean: f64, dim: FockDim) -> Result<PoissonWeights> {
    ensure_finite("mean", mean)?;
    if mean < 0.0 {
        return Err(KerrError::invalid("mean", "must be nonnegative"));
    }
    let weights = (0..dim.size())
        .map(|k| poisson_ln_pmf(mean, k).exp())
        .collect();
    Ok(PoissonWeights { mean, weights })
}

/// Density matrix in the truncated Fock basis; entry `(m, n)` is
/// `<m|rho|n>`.
#[derive(Debug, Clone)]
pub struct DensityOperator {
    dim: FockDim,
    elements: Mat<Complex64>,
}

impl DensityOperator {
    /// Wraps a square matrix. No physical validation is performed; see
    /// [`validate_density_operator`].
    pub fn from_matrix(elements: Mat<Complex64>, tail_tol: f64) -> Result<Self> {
        if elements.nrows() != elements.ncols() {
            return Err(KerrError::DimensionMismatch {
                left: elements.nrows(),
                right: elements.ncols(),
            });
        }
        let dim = FockDim::with_tail_tol(elements.nrows().saturating_sub(1), tail_tol)?;
        Ok(DensityOperator { dim, elements })
    }

    pub(crate) fn from_parts(dim: FockDim, elements: Mat<Complex64>) -> Self {
        debug_assert_eq!(elements.nrows(), dim.size());
        DensityOperator { dim, elements }
    }

    /// Projector `|psi><psi|`.
    pub fn pure(psi: &[Complex64], dim: FockDim) -> Result<Self> {
        if psi.len() != dim.size() {
            return Err(KerrError::DimensionMismatch {
                left: psi.len(),
                right: dim.size(),
            });
        }
        let elements = Mat::from_fn(dim.size(), dim.size(), |m, n| psi[m] * psi[n].conj());
        Ok(DensityOperator { dim, elements })
    }

    /// Coherent-state projector `|zeta><zeta|`.
    pub fn coherent(zeta: CoherentAmplitude, dim: FockDim) -> Result<Self> {
        let psi = coherent_state_vector(zeta, dim)?;
        Self::pure(&psi, dim)
    }

    /// Diagonal state with the given populations.
    pub fn diagonal_state(populations: &[f64], dim: FockDim) -> Result<Self> {
        if populations.len() != dim.size() {
            return Err(KerrError::DimensionMismatch {
                left: populations.len(),
                right: dim.size(),
            });
        }
        let elements = Mat::from_fn(dim.size(), dim.size(), |m, n| {
            if m == n {
                Complex64::new(populations[m], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        Ok(DensityOperator { dim, elements })
    }

    pub fn dim(&self) -> FockDim {
        self.dim
    }

    pub fn size(&self) -> usize {
        self.dim.size()
    }

    pub fn element(&self, m: usize, n: usize) -> Complex64 {
        self.elements[(m, n)]
    }

    pub fn matrix(&self) -> MatRef<'_, Complex64> {
        self.elements.as_ref()
    }

    pub fn into_matrix(self) -> Mat<Complex64> {
        self.elements
    }

    /// Photon-number populations `<k|rho|k>`.
    pub fn populations(&self) -> Vec<f64> {
        (0..self.size()).map(|k| self.elements[(k, k)].re).collect()
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.size()).map(|k| self.elements[(k, k)]).sum()
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &DensityOperator) -> Result<f64> {
        if self.size() != other.size() {
            return Err(KerrError::DimensionMismatch {
                left: self.size(),
                right: other.size(),
            });
        }
        let n = self.size();
        let mut worst = 0.0f64;
        for j in 0..n {
            for i in 0..n {
                let d = (self.elements[(i, j)] - other.elements[(i, j)]).norm();
                if d.is_nan() {
                    return Ok(f64::NAN);
                }
                worst = worst.max(d);
            }
        }
        Ok(worst)
    }

    /// Leading `dim.size()` block.
    pub fn truncated(&self, dim: FockDim) -> Result<Self> {
        if dim.size() > self.size() {
            return Err(KerrError::DimensionMismatch {
                left: dim.size(),
                right: self.size(),
            });
        }
        let elements = self
            .elements
            .as_ref()
            .submatrix(0, 0, dim.size(), dim.size())
            .to_owned();
        Ok(DensityOperator { dim, elements })
    }

    /// Conjugation by the diagonal unitary `exp(i phase_per_n2 * n^2)`,
    /// i.e. the unitary Kerr evolution with `phase_per_n2 = mu * z`.
    pub fn with_kerr_phase(&self, phase_per_n2: f64) -> Self {
        let n = self.size();
        let elements = Mat::from_fn(n, n, |m, k| {
            // m^2 - k^2 factored so the product stays an exact integer.
            let dm = (m as f64 - k as f64) * (m as f64 + k as f64);
            self.elements[(m, k)] * Complex64::from_polar(1.0, phase_per_n2 * dm)
        });
        DensityOperator {
            dim: self.dim,
            elements,
        }
    }
}

/// Tolerances used by [`validate_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidationTolerances {
    pub hermiticity: f64,
    pub trace: f64,
    pub min_eigenvalue: f64,
}

impl ValidationTolerances {
    pub fn for_dim(dim: FockDim) -> Self {
        ValidationTolerances {
            hermiticity: HERMITICITY_TOL,
            trace: dim.tail_tol() + TRACE_ROUNDOFF,
            min_eigenvalue: PSD_TOL,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    /// Largest `|rho[m][n] - conj(rho[n][m])|`.
    pub hermiticity_deviation: f64,
    /// `|Tr rho - 1|`.
    pub trace_deviation: f64,
    /// Smallest eigenvalue of the Hermitian part (lower triangle).
    pub min_eigenvalue: f64,
    pub hermitian: bool,
    pub trace_ok: bool,
    pub positive: bool,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.hermitian && self.trace_ok && self.positive
    }
}

/// Checks Hermiticity, unit trace and positivity at the default tolerances.
pub fn validate_density_operator(rho: &DensityOperator) -> Result<ValidationReport> {
    validate_with(rho, ValidationTolerances::for_dim(rho.dim()))
}

pub fn validate_with(rho: &DensityOperator, tol: ValidationTolerances) -> Result<ValidationReport> {
    let n = rho.size();
    let m = rho.matrix();
    let mut herm = 0.0f64;
    for j in 0..n {
        for i in j..n {
            herm = herm.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    let trace_deviation = (rho.trace() - Complex64::new(1.0, 0.0)).norm();
    let eigenvalues = linalg::hermitian_eigenvalues(m)?;
    let min_eigenvalue = eigenvalues.first().copied().unwrap_or(0.0);
    Ok(ValidationReport {
        hermiticity_deviation: herm,
        trace_deviation,
        min_eigenvalue,
        hermitian: herm <= tol.hermiticity,
        trace_ok: trace_deviation <= tol.trace,
        positive: min_eigenvalue >= tol.min_eigenvalue,
    })
}
