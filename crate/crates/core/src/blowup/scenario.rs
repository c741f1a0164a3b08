//! Two disjoint wells behind a high plateau.
//!
//! Each trap vanishes on a unit disc, rises smoothly to a plateau `H` over
//! the next unit of radius and grows cubically past `|x| = 6`. With one
//! bump `ζ = c(1−r²)³` per disc, the pair costs
//! `C_ζ = Σ(∫|∇ζ|² − ((a*−β)/2)∫ζ⁴)` at `bᵢ = a*−β`. When the discs are
//! more than four apart `inf(V₁+V₂) = H`, so `H = 2C_ζ` makes the energy on
//! the critical segment stay below `inf(V₁+V₂)`, which is what keeps a
//! minimizer from leaking to infinity there.

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use super::BlowupError;
use crate::criteria::CouplingParams;
use crate::fields::{energy_parts, Field2D, Grid2D, Potentials, Spectral};
use crate::minimizer::{minimize_from, FlowConfig};
use crate::townes::moment_of;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioVariant {
    /// discs at `(±2.5, 0)`, plateau `2C_ζ`
    #[default]
    Separated,
    /// both discs at the origin, so `inf(V₁+V₂) = 0`
    Coincident,
    /// separated discs with the plateau at `C_ζ/2`
    LowPlateau,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioReport {
    pub variant: ScenarioVariant,
    pub beta: f64,
    pub c_zeta: f64,
    pub plateau: f64,
    /// minimum of `V₁+V₂` over the grid
    pub inf_v_sum: f64,
    /// `δ` with `bᵢ = a* − β − δ`
    pub offsets: Vec<f64>,
    pub energies: Vec<f64>,
    /// `C_ζ < inf(V₁+V₂)`
    pub trial_below_plateau: bool,
    /// every computed energy is below `inf(V₁+V₂)`
    pub energy_below_inf: bool,
    /// energies fall as `δ` shrinks
    pub energy_decreasing: bool,
    pub pass: bool,
}

const CENTERS: [[f64; 2]; 2] = [[-2.5, 0.0], [2.5, 0.0]];
/// `β` as a fraction of `a*`
const BETA_SHARE: f64 = 0.3;
/// `δ` as fractions of `a*`
const OFFSETS: [f64; 3] = [1e-1, 3e-2, 1e-2];
const GROWTH_START: f64 = 6.0;

fn smoothstep(t: f64) -> f64 {
    let t = t.clamp(0.0, 1.0);
    t * t * t * (10.0 - 15.0 * t + 6.0 * t * t)
}

fn bump(grid: Grid2D, c: [f64; 2]) -> Field2D {
    Field2D::from_fn(grid, |x, y| {
        let r2 = (x - c[0]).powi(2) + (y - c[1]).powi(2);
        if r2 < 1.0 {
            (1.0 - r2).powi(3)
        } else {
            0.0
        }
    })
    .normalized()
}

fn trap(grid: &Grid2D, c: [f64; 2], plateau: f64) -> Array2<f64> {
    Field2D::from_fn(*grid, |x, y| {
        let r = ((x - c[0]).powi(2) + (y - c[1]).powi(2)).sqrt();
        let far = ((x * x + y * y).sqrt() - GROWTH_START).max(0.0);
        plateau * smoothstep(r - 1.0) + far.powi(3)
    })
    .values
}

pub fn separated_wells_scenario(grid: &Grid2D, cfg: &FlowConfig, variant: ScenarioVariant) -> Result<ScenarioReport, BlowupError> {
    grid.validate()?;
    cfg.validate()?;
    let q = crate::minimizer::seed_profile()?;
    let a_star = moment_of(&q, 0.0)?;
    let beta = BETA_SHARE * a_star;
    let centers = match variant {
        ScenarioVariant::Coincident => [[0.0, 0.0]; 2],
        _ => CENTERS,
    };
    let z = [bump(*grid, centers[0]), bump(*grid, centers[1])];
    let mut sp = Spectral::new(grid);
    let zero = Potentials::zero(grid);
    let parts = energy_parts(&z[0], &z[1], &zero, &mut sp);
    let c_zeta: f64 = (0..2)
        .map(|i| parts.kinetic[i] - 0.5 * (a_star - beta) * parts.quartic[i])
        .sum();
    let plateau = match variant {
        ScenarioVariant::LowPlateau => 0.5 * c_zeta,
        _ => 2.0 * c_zeta,
    };
    let pot = Potentials {
        v1: trap(grid, centers[0], plateau),
        v2: trap(grid, centers[1], plateau),
    };
    let inf_v_sum = (&pot.v1 + &pot.v2).iter().copied().fold(f64::INFINITY, f64::min);

    let mut energies = Vec::with_capacity(OFFSETS.len());
    let (mut u1, mut u2) = (z[0].clone(), z[1].clone());
    for &d in &OFFSETS {
        let b = a_star - beta - d * a_star;
        let params = CouplingParams { b1: b, b2: b, beta };
        let r = minimize_from(&params, &pot, u1, u2, cfg)?;
        energies.push(r.energy);
        u1 = r.u1;
        u2 = r.u2;
    }
    let trial_below_plateau = c_zeta < inf_v_sum;
    let energy_below_inf = energies.iter().all(|&e| e < inf_v_sum);
    let energy_decreasing = energies.windows(2).all(|w| w[1] < w[0]);
    let pass = match variant {
        ScenarioVariant::Coincident => energy_decreasing,
        _ => trial_below_plateau && energy_below_inf,
    };
    Ok(ScenarioReport {
        variant,
        beta,
        c_zeta,
        plateau,
        inf_v_sum,
        offsets: OFFSETS.iter().map(|d| d * a_star).collect(),
        energies,
        trial_below_plateau,
        energy_below_inf,
        energy_decreasing,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smoothstep_is_flat_at_both_ends() {
        assert_eq!(smoothstep(-1.0), 0.0);
        assert_eq!(smoothstep(2.0), 1.0);
        assert!((smoothstep(0.5) - 0.5).abs() < 1e-15);
        let h = 1e-4;
        assert!((smoothstep(1.0) - smoothstep(1.0 - h)) / h < 1e-6);
    }

    #[test]
    fn plateau_separates_the_discs() {
        let g = Grid2D::new(128, 8.0).unwrap();
        let v1 = trap(&g, CENTERS[0], 3.0);
        let v2 = trap(&g, CENTERS[1], 3.0);
        let m = (&v1 + &v2).iter().copied().fold(f64::INFINITY, f64::min);
        assert!((m - 3.0).abs() < 1e-12, "{m}");
    }
}
