//! Concentrated trial states `φ(x) = A·(τ/‖Q‖₂)·χ((x−x₀)/R)·Q(τ|x−x₀|)`.

use super::{FieldError, Field2D, Grid2D};
use crate::numeric::quad::gregory;
use crate::townes::{moment_of, RadialProfile};

/// Smooth radial cutoff: 1 on `|y| ≤ 1`, 0 on `|y| ≥ 2`,
/// `exp(1 − 1/(1 − (|y|−1)²))` in between.
pub fn cutoff(y: f64) -> f64 {
    let y = y.abs();
    if y <= 1.0 {
        1.0
    } else if y >= 2.0 {
        0.0
    } else {
        let s = y - 1.0;
        (1.0 - 1.0 / (1.0 - s * s)).exp()
    }
}

/// The continuum normalization `A_{Rτ}` making `A·(τ/‖Q‖₂)χ(·/R)Q(τ|·|)` a
/// unit-mass function. Depends on `R` and `τ` only through `Rτ`.
pub fn trial_normalization(r_tau: f64, townes: &RadialProfile) -> f64 {
    let a_star = moment_of(townes, 0.0).expect("zeroth moment of a valid profile");
    // deficit ∫(1 − χ²)Q² split at 2Rτ
    let n = 4001;
    let h = r_tau / (n - 1) as f64;
    let inner: Vec<f64> = (0..n)
        .map(|k| {
            let r = r_tau + k as f64 * h;
            let c = cutoff(r / r_tau);
            r * (1.0 - c * c) * townes.eval(r).powi(2)
        })
        .collect();
    let far_len = 40.0;
    let m = 2001;
    let hf = far_len / (m - 1) as f64;
    let far: Vec<f64> = (0..m)
        .map(|k| {
            let r = 2.0 * r_tau + k as f64 * hf;
            r * townes.eval(r).powi(2)
        })
        .collect();
    let deficit = 2.0 * std::f64::consts::PI * (gregory(&inner, h) + gregory(&far, hf));
    (1.0 - deficit / a_star).powf(-0.5)
}

/// Trial state centred at `x0`, normalized to unit discrete mass.
pub fn trial_phi(x0: [f64; 2], tau: f64, r_cut: f64, townes: &RadialProfile, grid: &Grid2D) -> Result<Field2D, FieldError> {
    if !(tau > 0.0 && r_cut > 0.0) {
        return Err(FieldError::InvalidInput(format!("need tau > 0 and R > 0 (got {tau}, {r_cut})")));
    }
    if r_cut * tau < 10.0 {
        return Err(FieldError::InvalidInput(format!("R·tau = {} is below 10", r_cut * tau)));
    }
    let l = grid.extent;
    let room = (l - x0[0].abs()).min(l - x0[1].abs());
    if 2.0 * r_cut > room {
        return Err(FieldError::InvalidInput(format!(
            "ball of radius {} around {x0:?} leaves the box",
            2.0 * r_cut
        )));
    }
    let f = Field2D::from_fn(*grid, |x, y| {
        let r = ((x - x0[0]).powi(2) + (y - x0[1]).powi(2)).sqrt();
        let c = cutoff(r / r_cut);
        if c == 0.0 {
            0.0
        } else {
            tau * c * townes.eval(tau * r)
        }
    });
    Ok(f.normalized())
}

/// `R` for a cutoff ball that fills half the room around `x0`.
pub(crate) fn default_cutoff_radius(x0: [f64; 2], grid: &Grid2D) -> f64 {
    let l = grid.extent;
    0.5 * (l - x0[0].abs()).min(l - x0[1].abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cutoff_shape() {
        assert_eq!(cutoff(0.0), 1.0);
        assert_eq!(cutoff(1.0), 1.0);
        assert_eq!(cutoff(-0.5), 1.0);
        assert_eq!(cutoff(2.0), 0.0);
        assert_eq!(cutoff(3.0), 0.0);
        assert!(cutoff(1.5) > 0.0 && cutoff(1.5) < 1.0);
        let mut prev = 1.0;
        for k in 0..=100 {
            let c = cutoff(1.0 + k as f64 / 100.0);
            assert!(c <= prev);
            prev = c;
        }
        assert!(cutoff(1.999) < 1e-200);
    }
}
