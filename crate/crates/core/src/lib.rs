//! Propagation of coherent light pulses through a medium with both linear
//! loss and a Kerr nonlinearity, in the truncated Fock basis.
//!
//! The crate provides the closed-form output state of the channel, its
//! Gaussian phase-diffusion approximation, an RK4 master-equation integrator
//! to check one against the other, state functionals (entropy, fidelity,
//! Holevo quantity, Husimi Q) and linearized squeezing statistics.

pub mod channel;
pub mod error;
pub mod fock;
pub mod linalg;
pub mod metrics;
pub mod ode;
pub mod squeezing;
pub mod sweep;

pub use channel::{
    c_factor, c_factor_normalization, dimensionless_nonlinearity, exact_output_state, f_tau,
    f_tau_quadratic, gaussian_params, phase_diffused_state, phase_noise_coefficient,
    phase_shift_coefficient, ChannelGeometry, FiberSpec, MediumParams, PhaseDiffusionParams,
};
pub use error::{KerrError, Result};
pub use fock::{
    coherent_state_vector, poisson_tail, poisson_weights, truncation_dimension,
    validate_density_operator, validate_with, CoherentAmplitude, DensityOperator, FockDim,
    PoissonWeights, ValidationReport, ValidationTolerances, DEFAULT_TAIL_TOL,
};
pub use metrics::{
    gaussian_infidelity, holevo_curves, holevo_ring, husimi_q, infidelity_map, poisson_entropy,
    uhlmann_fidelity, von_neumann_entropy, GridSpec, HolevoPoint, HolevoVariant, LogBase, QGrid,
    MAX_HOLEVO_TAU_NBAR,
};
pub use ode::{
    integrate_rk4, ode_oracle_converged, ode_oracle_integrate, ode_oracle_with_tol, OracleRun,
};
pub use squeezing::{
    approx_min_variance, excess_noise_factor, min_variance, optimal_angle, phase_moments,
    quadrature_stats, squeezing_curve, variance_at, QuadratureStats, SqueezingInput,
};
pub use sweep::{
    SweepMetadata, SweepParameter, SweepResult, SweepRow, TruncationPolicy, SCHEMA_VERSION,
};
