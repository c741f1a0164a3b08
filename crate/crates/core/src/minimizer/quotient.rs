//! Numerical estimate of
//! `𝒪 = inf Σ∫|∇uᵢ|² / [(b₁/2)∫u₁⁴ + (b₂/2)∫u₂⁴ + β∫u₁²u₂²]` over unit-mass
//! pairs without traps.
//!
//! The ratio is invariant under `u ↦ λu(λ·)`. The pair is dilated back to
//! its gauge kinetic sum whenever the sum leaves `[1/2, 2]` times the gauge;
//! between those resets the scaling direction is flat and harmless to the
//! descent.
//!
//! Dilating one component away while the other keeps the optimal single
//! profile shows `𝒪 ≤ a*/bⱼ` for each `j`. When the weaker component keeps
//! spreading (its share of the kinetic sum collapses) the infimum is that
//! limit and is not attained; the estimate is then `min(ratio, a*/max bⱼ)`.

use super::engine::{Engine, EngineConfig, Objective, Stop};
use super::{seed_profile, FlowConfig, MinimizeError};
use crate::criteria::CouplingParams;
use crate::fields::{Field2D, Grid2D, Potentials};
use crate::townes::moment_of;

#[derive(Debug, Clone)]
pub struct QuotientResult {
    pub ratio: f64,
    pub u1: Field2D,
    pub u2: Field2D,
    pub residual: f64,
    pub iters: usize,
    /// one component spread out and the value is the spreading limit
    pub dichotomy: bool,
}

/// Share of the kinetic sum below which a component counts as spreading.
pub const SPREAD_SHARE: f64 = 0.002;

/// Kinetic sum the pair is held near: 1, or more on boxes too small to hold
/// that profile (`L < 17`), where the core is shrunk to `L/12`.
pub fn gauge_target(grid: &Grid2D) -> f64 {
    (288.0 / (grid.extent * grid.extent)).max(1.0)
}

/// Minimizing pair of the quotient, gauged to kinetic sum near
/// [`gauge_target`].
pub fn quotient_minimizer(params: &CouplingParams, grid: &Grid2D, cfg: &FlowConfig) -> Result<QuotientResult, MinimizeError> {
    params.validate().map_err(|e| MinimizeError::InvalidConfig(e.to_string()))?;
    grid.validate()?;
    cfg.validate()?;
    let q = seed_profile()?;
    let target = gauge_target(grid);
    // kinetic of Q(|x|/s)/‖Q‖ is 1/s², so the pair's sum is 2/s²
    let s = (2.0 / target).sqrt();
    let f = Field2D::from_fn(*grid, |x, y| q.eval((x * x + y * y).sqrt() / s)).normalized();
    let zero = Potentials::zero(grid);
    let mut eng = Engine::new(Objective::Quotient(*params), &zero, f.clone(), f);
    let ec = EngineConfig {
        max_iters: cfg.max_iters,
        grad_tol: cfg.grad_tol,
        floor: f64::NEG_INFINITY,
        refresh_every: 25,
        gauge: Some((0.5 * target, 2.0 * target, target)),
        min_share: Some(SPREAD_SHARE),
        generators_every: None,
    };
    for _ in 0..4 {
        let (stop, res) = eng.run(&ec);
        if stop == Stop::Dichotomy {
            let a_star = moment_of(&q, 0.0)?;
            let ratio = eng.integrals().value(&eng.obj);
            eng.take_abs();
            let (u1, u2) = eng.fields();
            return Ok(QuotientResult {
                ratio: ratio.min(a_star / params.b1.max(params.b2)),
                u1,
                u2,
                residual: res,
                iters: eng.iters,
                dichotomy: true,
            });
        }
        if stop != Stop::Converged {
            return Err(MinimizeError::NonConvergence(format!(
                "{stop:?} after {} iterations, residual {res:e}",
                eng.iters
            )));
        }
        eng.take_abs();
        let ints = eng.integrals();
        let (g, _) = eng.tangent_gradient(&ints);
        let residual = eng.norm(&g[0]).max(eng.norm(&g[1]));
        if residual < cfg.grad_tol {
            let (u1, u2) = eng.fields();
            return Ok(QuotientResult {
                ratio: ints.value(&eng.obj),
                u1,
                u2,
                residual,
                iters: eng.iters,
                dichotomy: false,
            });
        }
    }
    Err(MinimizeError::NonConvergence("sign flips kept undoing convergence".into()))
}

/// `𝒪̂(b₁, b₂, β)`.
pub fn estimate_gn_quotient(params: &CouplingParams, grid: &Grid2D, cfg: &FlowConfig) -> Result<f64, MinimizeError> {
    quotient_minimizer(params, grid, cfg).map(|r| r.ratio)
}

#[cfg(test)]
mod tests {
    use super::*;

    const A_STAR: f64 = 11.700896524552151;

    #[test]
    fn critical_diagonal_gives_one() {
        let g = Grid2D::new(128, 16.0).unwrap();
        let beta = 0.4 * A_STAR;
        let p = CouplingParams::new(A_STAR - beta, A_STAR - beta, beta).unwrap();
        let cfg = FlowConfig::default().with_tol(1e-7);
        let r = quotient_minimizer(&p, &g, &cfg).unwrap();
        assert!((r.ratio - 1.0).abs() < 1e-3, "{}", r.ratio);
        let k = r.u1.grid.cell_area();
        assert!(k > 0.0);
    }
}
