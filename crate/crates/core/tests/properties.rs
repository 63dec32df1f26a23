mod common;

use kerr_core::{
    exact_output_state, f_tau, min_variance, optimal_angle, quadrature_stats, truncation_dimension,
    uhlmann_fidelity, validate_density_operator, variance_at, von_neumann_entropy, ChannelGeometry,
    CoherentAmplitude, LogBase, MediumParams, SqueezingInput,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn cases() -> ProptestConfig {
    ProptestConfig::with_cases(1000)
}

proptest! {
    #![proptest_config(cases())]

    #[test]
    fn channel_output_is_a_state(
        tau in 0.05f64..1.0,
        kappa in 0.0f64..0.5,
        tau_nbar in 0.0f64..40.0,
        phase in -3.2f64..3.2,
    ) {
        let medium = MediumParams::from_kappa(kappa).unwrap();
        let geom = ChannelGeometry::from_transmission(&medium, tau).unwrap();
        let input = CoherentAmplitude::from_mean_photon(tau_nbar / tau, phase).unwrap();
        let dim = truncation_dimension(tau_nbar, 1e-12).unwrap();
        let rho = exact_output_state(&medium, &geom, input, dim).unwrap();
        let report = validate_density_operator(&rho).unwrap();
        prop_assert!(report.is_valid(), "{report:?}");
    }

    #[test]
    fn f_tau_conjugate_symmetry(tau in 1e-9f64..1.0, x in -50.0f64..50.0) {
        let a = f_tau(tau, x).unwrap();
        let b = f_tau(tau, -x).unwrap();
        prop_assert!((a - b.conj()).norm() <= 1e-15 * (1.0 + a.norm()));
        prop_assert!(a.re >= -1e-15);
    }

    #[test]
    fn entropy_unitary_invariance(seed in any::<u64>(), phase in -10.0f64..10.0, rank in 1usize..8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rho = common::random_state(&mut rng, 30, rank);
        let s = von_neumann_entropy(&rho, LogBase::Nats).unwrap();
        let t = von_neumann_entropy(&rho.with_kerr_phase(phase), LogBase::Nats).unwrap();
        prop_assert!((s - t).abs() < 1e-10, "{s} vs {t}");
    }

    #[test]
    fn fidelity_symmetry(seed in any::<u64>(), r1 in 1usize..6, r2 in 1usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = common::random_state(&mut rng, 30, r1);
        let b = common::random_state(&mut rng, 30, r2);
        let fab = uhlmann_fidelity(&a, &b).unwrap();
        let fba = uhlmann_fidelity(&b, &a).unwrap();
        prop_assert!((fab - fba).abs() < 1e-9);
        prop_assert!((0.0..=1.0 + 1e-9).contains(&fab));
    }

    #[test]
    fn min_variance_is_smallest_eigenvalue(
        zeta2 in 0.0f64..1e6,
        r in 0.0f64..4.0,
        sigma2 in 0.0f64..2.0,
    ) {
        let input = SqueezingInput::new(zeta2, r, sigma2).unwrap();
        let st = quadrature_stats(&input);
        let half_sum = 0.5 * (st.var_q + st.var_p);
        let half_diff = 0.5 * (st.var_q - st.var_p);
        let radius = half_diff.hypot(st.cov_qp);
        // Reference eigenvalue from the naive determinant; its rounding error
        // is of order eps * scale.
        let det = st.var_q * st.var_p - st.cov_qp * st.cov_qp;
        let lam_min = det / (half_sum + radius);
        let v = min_variance(&input);
        let scale = half_sum + radius;
        prop_assert!((v - lam_min).abs() <= 1e-10 * v + 1e-14 * scale, "{v} vs {lam_min}");
        prop_assert!(v <= st.var_q * (1.0 + 1e-12) && v <= st.var_p * (1.0 + 1e-12));
        prop_assert!(st.var_q * st.var_p - st.cov_qp * st.cov_qp >= 1.0 - 1e-9);
        let theta = optimal_angle(&input);
        prop_assert!(theta > -std::f64::consts::FRAC_PI_4 - 1e-15 && theta <= 0.0);
        prop_assert!((variance_at(&input, theta) - v).abs() <= 1e-9 * scale);
    }

    #[test]
    fn phase_noise_never_helps(zeta2 in 0.0f64..1e5, r in 0.0f64..3.0, s1 in 0.0f64..1.0, ds in 0.0f64..1.0) {
        let a = min_variance(&SqueezingInput::new(zeta2, r, s1).unwrap());
        let b = min_variance(&SqueezingInput::new(zeta2, r, s1 + ds).unwrap());
        prop_assert!(b >= a * (1.0 - 1e-12));
    }
}
