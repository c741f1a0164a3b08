//! Affine resampling `ū(x) = A·u(s·x + t)` by trigonometric interpolation.
//!
//! The interpolant is separable, so the resampled array is `Wᵧ U Wₓᵀ` with
//! one dense interpolation matrix per axis. Source points outside the box
//! read as zero.

use ndarray::Array2;

use super::{FieldError, Field2D, Grid2D, Spectral};

/// Spectral power beyond the rescaled band limit tolerated by [`rescale`].
const ALIAS_POWER: f64 = 1e-10;
/// Relative mass change tolerated by [`rescale`].
const MASS_DRIFT: f64 = 1e-8;

/// Weights of the band-limited periodic interpolant at `s`, one per node.
fn weights(grid: &Grid2D, s: f64, out: &mut [f64]) {
    let n = grid.n;
    let l = grid.extent;
    if !(s >= -l && s < l) {
        out.iter_mut().for_each(|w| *w = 0.0);
        return;
    }
    let h = grid.spacing();
    let pos = (s + l) / h;
    let nearest = pos.round();
    if (pos - nearest).abs() < 1e-13 {
        out.iter_mut().for_each(|w| *w = 0.0);
        out[(nearest as usize) % n] = 1.0;
        return;
    }
    let nf = n as f64;
    for (m, w) in out.iter_mut().enumerate() {
        // θ = 2π(s − x_m)/(2L); kernel sin(nθ/2)·cot(θ/2)/n
        let half = std::f64::consts::PI * (pos - m as f64) / nf;
        *w = (nf * half).sin() / (nf * half.tan());
    }
}

fn matrix(grid: &Grid2D, targets: impl Iterator<Item = f64>) -> Array2<f64> {
    let n = grid.n;
    let mut a = Array2::zeros((n, n));
    for (row, s) in targets.enumerate() {
        weights(grid, s, a.row_mut(row).as_slice_mut().expect("standard layout"));
    }
    a
}

/// `ū(x, y) = amplitude · u(scale·x + shift₀, scale·y + shift₁)` on the same grid.
pub fn resample(u: &Field2D, scale: f64, shift: [f64; 2], amplitude: f64) -> Field2D {
    let g = u.grid;
    let xs = g.coords();
    let ax = matrix(&g, xs.iter().map(|&x| scale * x + shift[0]));
    let ay = matrix(&g, xs.iter().map(|&y| scale * y + shift[1]));
    let mut v = ay.dot(&u.values).dot(&ax.t());
    if amplitude != 1.0 {
        v *= amplitude;
    }
    Field2D { grid: g, values: v }
}

/// `ū(x) = λ·u(λ(x − c) + c)`: mass-preserving dilation about `c`.
pub fn rescale_about(u: &Field2D, lambda: f64, center: [f64; 2]) -> Result<Field2D, FieldError> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(FieldError::InvalidInput(format!("scale factor must be positive (got {lambda})")));
    }
    if lambda == 1.0 {
        return Ok(u.clone());
    }
    if lambda > 1.0 {
        let mut sp = Spectral::new(&u.grid);
        let frac = sp.power_beyond(&u.values, u.grid.nyquist() / lambda);
        if frac > ALIAS_POWER {
            return Err(FieldError::AliasRisk {
                lambda,
                detail: format!("{frac:e} of the spectral power lies beyond the shrunken band limit"),
            });
        }
    }
    let shift = [center[0] * (1.0 - lambda), center[1] * (1.0 - lambda)];
    let out = resample(u, lambda, shift, lambda);
    let (m0, m1) = (u.mass(), out.mass());
    if m0 > 0.0 && (m1 / m0 - 1.0).abs() > MASS_DRIFT {
        return Err(FieldError::AliasRisk {
            lambda,
            detail: format!("mass changes from {m0} to {m1}; the field does not fit the box after dilation"),
        });
    }
    Ok(out)
}

/// `ū(x) = λ·u(λx)`.
pub fn rescale(u: &Field2D, lambda: f64) -> Result<Field2D, FieldError> {
    rescale_about(u, lambda, [0.0, 0.0])
}
