//! Polynomial traps `Vᵢ(x) = hᵢ ∏ⱼ |x − xᵢⱼ|^{pᵢⱼ}` and their flatness data.
//!
//! Centers shared by both components must come first and in the same order
//! in both lists; the remaining centers are private to one component.

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use super::{FieldError, Grid2D};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Well {
    pub center: [f64; 2],
    pub exponent: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentSpec {
    pub wells: Vec<Well>,
    #[serde(default = "one")]
    pub modulator: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialSpec {
    pub components: [ComponentSpec; 2],
}

impl PotentialSpec {
    /// Both components `h·∏|x − c|^p` with the same wells.
    pub fn symmetric(wells: Vec<Well>) -> Self {
        let c = ComponentSpec { wells, modulator: 1.0 };
        Self {
            components: [c.clone(), c],
        }
    }

    /// `|x|^p` in both components.
    pub fn monomial(p: f64) -> Self {
        Self::symmetric(vec![Well {
            center: [0.0, 0.0],
            exponent: p,
        }])
    }

    pub fn harmonic() -> Self {
        Self::monomial(2.0)
    }

    pub fn validate(&self) -> Result<(), FieldError> {
        for (i, comp) in self.components.iter().enumerate() {
            if comp.wells.is_empty() {
                return Err(FieldError::InvalidSpec(format!("component {} has no wells", i + 1)));
            }
            if !(comp.modulator > 0.0 && comp.modulator.is_finite()) {
                return Err(FieldError::InvalidSpec(format!(
                    "component {} modulator must be positive (got {})",
                    i + 1,
                    comp.modulator
                )));
            }
            for (j, w) in comp.wells.iter().enumerate() {
                if !(w.exponent > 0.0 && w.exponent.is_finite()) {
                    return Err(FieldError::InvalidSpec(format!(
                        "component {} well {} exponent must be positive (got {})",
                        i + 1,
                        j + 1,
                        w.exponent
                    )));
                }
                if !(w.center[0].is_finite() && w.center[1].is_finite()) {
                    return Err(FieldError::InvalidSpec(format!("component {} well {} center", i + 1, j + 1)));
                }
                if comp.wells[..j].iter().any(|o| o.center == w.center) {
                    return Err(FieldError::InvalidSpec(format!(
                        "component {} lists center {:?} twice",
                        i + 1,
                        w.center
                    )));
                }
            }
        }
        Ok(())
    }

    /// `h·∏|x − c|^p` of one component at a point.
    pub fn value(&self, component: usize, x: f64, y: f64) -> f64 {
        let comp = &self.components[component];
        comp.modulator
            * comp
                .wells
                .iter()
                .map(|w| ((x - w.center[0]).powi(2) + (y - w.center[1]).powi(2)).powf(0.5 * w.exponent))
                .product::<f64>()
    }
}

/// Flatness data of a trap pair. `gamma_j[j] = None` stands for `γⱼ = ∞`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialAnalysis {
    /// common zeros `Λ`
    pub lambda_set: Vec<[f64; 2]>,
    pub pbar: Vec<f64>,
    pub p0: f64,
    pub gamma_j: Vec<Option<f64>>,
    pub gamma: f64,
    /// flattest common zeros `𝒵`
    pub z_set: Vec<[f64; 2]>,
}

impl PotentialAnalysis {
    /// Member of `𝒵` closest to `x`.
    pub fn nearest_z(&self, x: [f64; 2]) -> [f64; 2] {
        let d = |z: &[f64; 2]| (z[0] - x[0]).powi(2) + (z[1] - x[1]).powi(2);
        *self
            .z_set
            .iter()
            .min_by(|a, b| d(a).total_cmp(&d(b)))
            .expect("z_set is never empty")
    }
}

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

pub fn analyze_potential(spec: &PotentialSpec) -> Result<PotentialAnalysis, FieldError> {
    spec.validate()?;
    let [c1, c2] = &spec.components;
    let shared = c1
        .wells
        .iter()
        .zip(&c2.wells)
        .take_while(|(a, b)| a.center == b.center)
        .count();
    for (i, own, other) in [(1, c1, c2), (2, c2, c1)] {
        for w in &own.wells[shared..] {
            if other.wells.iter().any(|o| o.center == w.center) {
                return Err(FieldError::AssumptionViolation(format!(
                    "center {:?} of component {i} is a zero of both traps but is not listed in the shared prefix",
                    w.center
                )));
            }
        }
    }
    if shared == 0 {
        return Err(FieldError::AssumptionViolation(
            "the traps have no common zero".into(),
        ));
    }
    let lambda_set: Vec<[f64; 2]> = c1.wells[..shared].iter().map(|w| w.center).collect();
    let pbar: Vec<f64> = (0..shared)
        .map(|j| c1.wells[j].exponent.min(c2.wells[j].exponent))
        .collect();
    let p0 = pbar.iter().copied().fold(f64::NEG_INFINITY, f64::max);

    let gamma_j: Vec<Option<f64>> = (0..shared)
        .map(|j| {
            if pbar[j] < p0 {
                return None;
            }
            let xj = lambda_set[j];
            let mut g = 0.0;
            for comp in [c1, c2] {
                if comp.wells[j].exponent == p0 {
                    let rest: f64 = comp
                        .wells
                        .iter()
                        .enumerate()
                        .filter(|&(k, _)| k != j)
                        .map(|(_, w)| dist(xj, w.center).powf(w.exponent))
                        .product();
                    g += comp.modulator * rest;
                }
            }
            Some(g)
        })
        .collect();
    let gamma = gamma_j.iter().flatten().copied().fold(f64::INFINITY, f64::min);
    let z_set: Vec<[f64; 2]> = (0..shared)
        .filter(|&j| gamma_j[j] == Some(gamma))
        .map(|j| lambda_set[j])
        .collect();
    Ok(PotentialAnalysis {
        lambda_set,
        pbar,
        p0,
        gamma_j,
        gamma,
        z_set,
    })
}

/// Both traps sampled at the grid nodes.
pub fn eval_potential(spec: &PotentialSpec, grid: &Grid2D) -> (Array2<f64>, Array2<f64>) {
    let xs = grid.coords();
    let n = grid.n;
    let v1 = Array2::from_shape_fn((n, n), |(r, c)| spec.value(0, xs[c], xs[r]));
    let v2 = Array2::from_shape_fn((n, n), |(r, c)| spec.value(1, xs[c], xs[r]));
    (v1, v2)
}
