//! Real fields on a square periodic grid, trapping potentials, the energy
//! functional and the operations on fields the solvers need.

mod functional;
pub mod io;
mod potential;
mod rescale;
mod spectral;
mod trial;

use ndarray::Array2;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use functional::{
    energy, energy_parts, gradient, gradient_parts, single_energy, split_energy, EnergyParts, Potentials,
};
pub use potential::{analyze_potential, eval_potential, ComponentSpec, PotentialAnalysis, PotentialSpec, Well};
pub use rescale::{rescale, rescale_about, resample};
pub use spectral::Spectral;
pub use trial::{cutoff, trial_normalization, trial_phi};
pub(crate) use trial::default_cutoff_radius;

#[derive(Debug, Error)]
pub enum FieldError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("component {component} has mass {mass}, expected 1")]
    MassViolation { component: usize, mass: f64 },
    #[error("rescaling by {lambda} would alias: {detail}")]
    AliasRisk { lambda: f64, detail: String },
    #[error("invalid potential: {0}")]
    InvalidSpec(String),
    #[error("potential violates the shared-zero numbering: {0}")]
    AssumptionViolation(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Tolerance on `|mass − 1|` accepted by the energy and its gradient.
pub const MASS_TOL: f64 = 1e-8;

/// `n × n` nodes `x_j = −L + j·h` covering `[−L, L)²`, `h = 2L/n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid2D {
    pub n: usize,
    pub extent: f64,
}

impl Grid2D {
    pub fn new(n: usize, extent: f64) -> Result<Self, FieldError> {
        let g = Self { n, extent };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<(), FieldError> {
        if self.n < 64 || !self.n.is_power_of_two() {
            return Err(FieldError::InvalidGrid(format!(
                "n must be a power of two, at least 64 (got {})",
                self.n
            )));
        }
        if !(self.extent >= 8.0) || !self.extent.is_finite() {
            return Err(FieldError::InvalidGrid(format!("extent must be at least 8 (got {})", self.extent)));
        }
        Ok(())
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.extent / self.n as f64
    }

    pub fn cell_area(&self) -> f64 {
        self.spacing().powi(2)
    }

    pub fn coord(&self, j: usize) -> f64 {
        -self.extent + j as f64 * self.spacing()
    }

    pub fn coords(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.coord(j)).collect()
    }

    /// Angular wavenumber of FFT index `j`.
    pub fn wavenumber(&self, j: usize) -> f64 {
        let n = self.n as isize;
        let j = j as isize;
        let m = if j < n / 2 { j } else { j - n };
        std::f64::consts::PI * m as f64 / self.extent
    }

    pub fn nyquist(&self) -> f64 {
        std::f64::consts::PI / self.spacing()
    }
}

/// One component on a [`Grid2D`]; `values[[row, col]]` sits at
/// `(x_col, y_row)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Field2D {
    pub grid: Grid2D,
    pub values: Array2<f64>,
}

impl Field2D {
    pub fn new(grid: Grid2D, values: Array2<f64>) -> Result<Self, FieldError> {
        if values.dim() != (grid.n, grid.n) {
            return Err(FieldError::InvalidInput(format!(
                "array shape {:?} does not match grid size {}",
                values.dim(),
                grid.n
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: Grid2D) -> Self {
        Self {
            grid,
            values: Array2::zeros((grid.n, grid.n)),
        }
    }

    pub fn from_fn<F: FnMut(f64, f64) -> f64>(grid: Grid2D, mut f: F) -> Self {
        let xs = grid.coords();
        let values = Array2::from_shape_fn((grid.n, grid.n), |(r, c)| f(xs[c], xs[r]));
        Self { grid, values }
    }

    pub fn mass(&self) -> f64 {
        self.grid.cell_area() * self.values.iter().map(|v| v * v).sum::<f64>()
    }

    pub fn normalize(&mut self) {
        let m = self.mass();
        if m > 0.0 {
            self.values *= 1.0 / m.sqrt();
        }
    }

    pub fn normalized(mut self) -> Self {
        self.normalize();
        self
    }

    /// `∫ f·g` by the rectangle rule (spectrally accurate for periodic data).
    pub fn inner(&self, other: &Field2D) -> f64 {
        self.grid.cell_area() * dot(&self.values, &other.values)
    }

    pub fn l2_distance(&self, other: &Field2D) -> f64 {
        let s: f64 = self.values.iter().zip(other.values.iter()).map(|(a, b)| (a - b).powi(2)).sum();
        (self.grid.cell_area() * s).sqrt()
    }

    /// Largest `|u|` on the outermost ring of nodes.
    pub fn boundary_max(&self) -> f64 {
        let n = self.grid.n;
        let v = &self.values;
        let mut m = 0.0f64;
        for k in 0..n {
            m = m.max(v[[0, k]].abs()).max(v[[n - 1, k]].abs()).max(v[[k, 0]].abs()).max(v[[k, n - 1]].abs());
        }
        m
    }

    /// Global maximum point: the first node (row-major) attaining the largest
    /// value, refined by a parabola through its neighbours along each axis.
    pub fn max_location(&self) -> [f64; 2] {
        max_location(&self.values, &self.grid)
    }
}

pub(crate) fn dot(a: &Array2<f64>, b: &Array2<f64>) -> f64 {
    match (a.as_slice(), b.as_slice()) {
        (Some(x), Some(y)) => x.iter().zip(y).map(|(p, q)| p * q).sum(),
        _ => a.iter().zip(b.iter()).map(|(p, q)| p * q).sum(),
    }
}

pub(crate) fn max_location(values: &Array2<f64>, grid: &Grid2D) -> [f64; 2] {
    let n = grid.n;
    let mut best = (0usize, 0usize);
    let mut best_v = f64::NEG_INFINITY;
    for ((r, c), &v) in values.indexed_iter() {
        if v > best_v {
            best_v = v;
            best = (r, c);
        }
    }
    let (r, c) = best;
    let h = grid.spacing();
    let vertex = |m: f64, z: f64, p: f64| {
        let den = m - 2.0 * z + p;
        if den < 0.0 {
            (0.5 * (m - p) / den).clamp(-0.5, 0.5)
        } else {
            0.0
        }
    };
    let dx = if c > 0 && c + 1 < n {
        vertex(values[[r, c - 1]], values[[r, c]], values[[r, c + 1]])
    } else {
        0.0
    };
    let dy = if r > 0 && r + 1 < n {
        vertex(values[[r - 1, c]], values[[r, c]], values[[r + 1, c]])
    } else {
        0.0
    };
    [grid.coord(c) + dx * h, grid.coord(r) + dy * h]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_validation() {
        assert!(Grid2D::new(64, 8.0).is_ok());
        assert!(Grid2D::new(96, 8.0).is_err());
        assert!(Grid2D::new(32, 8.0).is_err());
        assert!(Grid2D::new(64, 7.9).is_err());
        let g = Grid2D::new(64, 8.0).unwrap();
        assert_eq!(g.spacing(), 0.25);
        assert_eq!(g.coord(0), -8.0);
        assert_eq!(g.coord(32), 0.0);
        assert_eq!(g.wavenumber(1), std::f64::consts::PI / 8.0);
        assert_eq!(g.wavenumber(63), -std::f64::consts::PI / 8.0);
    }

    #[test]
    fn gaussian_mass_and_max() {
        let g = Grid2D::new(128, 8.0).unwrap();
        let f = Field2D::from_fn(g, |x, y| (-((x - 0.3).powi(2) + (y + 1.1).powi(2))).exp()).normalized();
        assert!((f.mass() - 1.0).abs() < 1e-14);
        let [mx, my] = f.max_location();
        assert!((mx - 0.3).abs() < 5e-3 && (my + 1.1).abs() < 5e-3, "{mx} {my}");
        assert!(f.boundary_max() < 1e-20);
    }

    #[test]
    fn max_ties_break_to_first_index() {
        let g = Grid2D::new(64, 8.0).unwrap();
        let mut f = Field2D::zeros(g);
        f.values[[10, 20]] = 1.0;
        f.values[[10, 30]] = 1.0;
        f.values[[40, 5]] = 1.0;
        let [x, y] = f.max_location();
        assert_eq!((x, y), (g.coord(20), g.coord(10)));
    }
}
