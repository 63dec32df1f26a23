#![allow(dead_code)]

use faer::Mat;
use kerr_core::DensityOperator;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

/// Random mixed state `A A^dag / Tr(A A^dag)` with `A` of size x rank.
pub fn random_state<R: Rng>(rng: &mut R, size: usize, rank: usize) -> DensityOperator {
    let a = Mat::from_fn(size, rank, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let mut rho = &a * a.adjoint();
    let tr: f64 = (0..size).map(|i| rho[(i, i)].re).sum();
    for j in 0..size {
        for i in 0..size {
            rho[(i, j)] /= tr;
        }
    }
    // Exact Hermiticity.
    for j in 0..size {
        rho[(j, j)].im = 0.0;
        for i in j + 1..size {
            rho[(j, i)] = rho[(i, j)].conj();
        }
    }
    DensityOperator::from_matrix(rho, 1e-12).unwrap()
}

/// Gauss-Hermite nodes and weights for the weight `exp(-x^2)` from the
/// eigen-decomposition of the Jacobi matrix.
pub fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    let jacobi = Mat::from_fn(n, n, |i, j| {
        if i.abs_diff(j) == 1 {
            Complex64::new((i.max(j) as f64 / 2.0).sqrt(), 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let eig = jacobi.self_adjoint_eigen(faer::Side::Lower).unwrap();
    let nodes: Vec<f64> = eig.S().column_vector().iter().map(|l| l.re).collect();
    let u = eig.U();
    let weights = (0..n)
        .map(|k| std::f64::consts::PI.sqrt() * u[(0, k)].norm_sqr())
        .collect();
    (nodes, weights)
}

/// `<k|zeta>` by the plain recurrence `c_k = c_{k-1} zeta / sqrt(k)`.
pub fn coherent_by_recurrence(zeta: Complex64, size: usize) -> Vec<Complex64> {
    let mut c = vec![Complex64::new((-0.5 * zeta.norm_sqr()).exp(), 0.0); size];
    for k in 1..size {
        c[k] = c[k - 1] * zeta / (k as f64).sqrt();
    }
    c
}
