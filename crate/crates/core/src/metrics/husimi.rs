use faer::Mat;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{KerrError, Result};
use crate::fock::{coherent_components, DensityOperator};

/// Margin, in units of vacuum width, the grid must extend past the mean
/// amplitude.
pub const MIN_RADIUS_MARGIN: f64 = 5.0;

/// Missing mass above which a [`QGrid`] carries a warning.
pub const BOUNDARY_MASS_WARN: f64 = 1e-6;

/// Square grid `[-radius, radius]^2` with `points` samples per axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub radius: f64,
    pub points: usize,
}

impl GridSpec {
    pub fn new(radius: f64, points: usize) -> Result<Self> {
        if !radius.is_finite() || radius <= 0.0 {
            return Err(KerrError::invalid("radius", "must be positive and finite"));
        }
        if points < 2 {
            return Err(KerrError::invalid(
                "points",
                "need at least 2 points per axis",
            ));
        }
        Ok(GridSpec { radius, points })
    }

    /// Grid reaching six vacuum widths past an amplitude of `sqrt(mean)`.
    pub fn covering(mean_photon: f64) -> Self {
        GridSpec {
            radius: mean_photon.max(0.0).sqrt() + 6.0,
            points: 201,
        }
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.radius / (self.points - 1) as f64
    }

    pub fn axis(&self) -> Vec<f64> {
        let h = self.spacing();
        (0..self.points)
            .map(|i| -self.radius + i as f64 * h)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QGrid {
    pub re_axis: Vec<f64>,
    pub im_axis: Vec<f64>,
    /// `values[i][j]` is Q at `re_axis[j] + i im_axis[i]`.
    pub values: Vec<Vec<f64>>,
    /// Trace of the state not accounted for by the grid quadrature.
    pub boundary_mass: f64,
    pub warning: Option<String>,
}

impl QGrid {
    /// Riemann sum of Q over the grid.
    pub fn integral(&self) -> f64 {
        let hx = self.re_axis[1] - self.re_axis[0];
        let hy = self.im_axis[1] - self.im_axis[0];
        self.values.iter().flatten().sum::<f64>() * hx * hy
    }

    pub fn max(&self) -> f64 {
        self.values.iter().flatten().copied().fold(0.0, f64::max)
    }

    /// Grid point carrying the largest value, as `(re, im)`.
    pub fn argmax(&self) -> (f64, f64) {
        let mut best = (0, 0, f64::NEG_INFINITY);
        for (i, row) in self.values.iter().enumerate() {
            for (j, &q) in row.iter().enumerate() {
                if q > best.2 {
                    best = (i, j, q);
                }
            }
        }
        (self.re_axis[best.1], self.im_axis[best.0])
    }
}

fn mean_photon(rho: &DensityOperator) -> f64 {
    rho.populations()
        .iter()
        .enumerate()
        .map(|(n, p)| n as f64 * p)
        .sum()
}

/// `Q(beta) = <beta|rho|beta> / pi` on a square grid.
pub fn husimi_q(rho: &DensityOperator, grid: GridSpec) -> Result<QGrid> {
    let grid = GridSpec::new(grid.radius, grid.points)?;
    let needed = mean_photon(rho).max(0.0).sqrt() + MIN_RADIUS_MARGIN;
    if grid.radius < needed {
        return Err(KerrError::invalid(
            "radius",
            format!("grid radius {} below required {needed}", grid.radius),
        ));
    }
    let size = rho.size();
    let axis = grid.axis();
    let p = grid.points;
    let inv_pi = std::f64::consts::FRAC_1_PI;
    let mut values = Vec::with_capacity(p);
    for &im in &axis {
        let columns: Vec<Vec<Complex64>> = axis
            .iter()
            .map(|&re| coherent_components(Complex64::new(re, im), size))
            .collect();
        let v = Mat::from_fn(size, p, |n, j| columns[j][n]);
        let rv = rho.matrix() * &v;
        let row = (0..p)
            .map(|j| {
                let q: f64 = (0..size).map(|m| (v[(m, j)].conj() * rv[(m, j)]).re).sum();
                (q * inv_pi).clamp(0.0, inv_pi)
            })
            .collect();
        values.push(row);
    }
    let mut out = QGrid {
        re_axis: axis.clone(),
        im_axis: axis,
        values,
        boundary_mass: 0.0,
        warning: None,
    };
    out.boundary_mass = (rho.trace().re - out.integral()).max(0.0);
    if out.boundary_mass > BOUNDARY_MASS_WARN {
        out.warning = Some(format!(
            "grid misses {:.3e} of the state's mass; enlarge the radius",
            out.boundary_mass
        ));
    }
    Ok(out)
}
