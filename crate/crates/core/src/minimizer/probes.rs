//! Nonexistence evidence by dilating a compact seed, and a multi-start probe
//! of uniqueness.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{minimize_from, quotient_minimizer, FlowConfig, MinimizeError};
use crate::criteria::CouplingParams;
use crate::fields::{cutoff, energy_parts, Field2D, Grid2D, PotentialSpec, Potentials, Spectral};

/// Dilations wide enough to expose `λ²`-growth over the trap term.
pub const DEFAULT_ESCAPE_LAMBDAS: [f64; 8] = [1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 128.0];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EscapeOutcome {
    pub lambdas: Vec<f64>,
    pub energies: Vec<f64>,
    pub verdict: bool,
}

/// True when the sequence ends in a strictly decreasing run of at least two
/// values and the last value is below `−10·|first|`.
pub fn escape_verdict(energies: &[f64]) -> bool {
    let n = energies.len();
    if n < 2 {
        return false;
    }
    let decreasing_tail = energies[n - 2] > energies[n - 1];
    decreasing_tail && energies[n - 1] < -10.0 * energies[0].abs()
}

/// Energies of `λu(λx)` for the truncated quotient minimizer.
///
/// Kinetic and quartic terms scale exactly by `λ²`, and
/// `∫V(x)λ²u(λx)² = ∫V(x/λ)u(x)²`; the family is evaluated through these
/// identities on the seed's own grid, so no λ ever needs resampling.
pub fn scaling_escape_test(
    params: &CouplingParams,
    pot: &PotentialSpec,
    grid: &Grid2D,
    lambdas: &[f64],
    cfg: &FlowConfig,
) -> Result<EscapeOutcome, MinimizeError> {
    pot.validate()?;
    if lambdas.is_empty() || lambdas.iter().any(|&l| !(l > 0.0 && l.is_finite())) {
        return Err(MinimizeError::InvalidConfig("lambdas must be a non-empty list of positive values".into()));
    }
    let q = quotient_minimizer(params, grid, cfg)?;
    let r_cut = 0.45 * grid.extent;
    let truncate = |u: &Field2D| {
        let mut t = u.clone();
        let xs = grid.coords();
        for ((r, c), v) in t.values.indexed_iter_mut() {
            *v *= cutoff((xs[c] * xs[c] + xs[r] * xs[r]).sqrt() / r_cut);
        }
        t.normalized()
    };
    let (u1, u2) = (truncate(&q.u1), truncate(&q.u2));
    let mut sp = Spectral::new(grid);
    let parts = energy_parts(&u1, &u2, &Potentials::zero(grid), &mut sp);
    let scale_free = parts.total(params);
    let xs = grid.coords();
    let area = grid.cell_area();
    let energies = lambdas
        .iter()
        .map(|&lam| {
            let mut trap = 0.0;
            for (i, u) in [&u1, &u2].into_iter().enumerate() {
                for ((r, c), &v) in u.values.indexed_iter() {
                    if v != 0.0 {
                        trap += pot.value(i, xs[c] / lam, xs[r] / lam) * v * v;
                    }
                }
            }
            lam * lam * scale_free + area * trap
        })
        .collect::<Vec<_>>();
    Ok(EscapeOutcome {
        lambdas: lambdas.to_vec(),
        verdict: escape_verdict(&energies),
        energies,
    })
}

fn random_start(rng: &mut ChaCha8Rng, grid: &Grid2D) -> Field2D {
    let c = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
    let w: f64 = rng.gen_range(0.6..1.6);
    let k = [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)];
    let phase: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    Field2D::from_fn(*grid, |x, y| {
        let g = (-((x - c[0]).powi(2) + (y - c[1]).powi(2)) / (2.0 * w * w)).exp();
        g * (1.0 + 0.3 * (k[0] * x + k[1] * y + phase).sin())
    })
    .normalized()
}

/// Largest pairwise L² distance between minimizers reached from `n_starts`
/// random starts drawn from `cfg.seed`.
pub fn uniqueness_probe(
    params: &CouplingParams,
    pot: &PotentialSpec,
    grid: &Grid2D,
    cfg: &FlowConfig,
    n_starts: usize,
) -> Result<f64, MinimizeError> {
    pot.validate()?;
    grid.validate()?;
    let v = Potentials::from_spec(pot, grid);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut found = Vec::with_capacity(n_starts);
    for _ in 0..n_starts {
        let a = random_start(&mut rng, grid);
        let b = random_start(&mut rng, grid);
        let r = minimize_from(params, &v, a, b, cfg)?;
        found.push((r.u1, r.u2));
    }
    let mut worst = 0.0f64;
    for i in 0..found.len() {
        for j in i + 1..found.len() {
            let d1 = found[i].0.l2_distance(&found[j].0);
            let d2 = found[i].1.l2_distance(&found[j].1);
            worst = worst.max((d1 * d1 + d2 * d2).sqrt());
        }
    }
    Ok(worst)
}
