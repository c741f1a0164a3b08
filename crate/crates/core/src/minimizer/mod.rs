//! Constrained minimization of the coupled energy, Lagrange multipliers, the
//! auxiliary quotient, and the nonexistence and uniqueness probes.
//!
//! Two descent schemes share the same stopping rule
//! `maxᵢ ‖gᵢ − 2μ̂ᵢuᵢ‖₂ < grad_tol`, `μ̂ᵢ = ⟨gᵢ,uᵢ⟩/2`:
//! preconditioned conjugate gradients along great circles of the two unit
//! spheres (default), and the semi-implicit normalized gradient flow.

mod engine;
mod flow;
mod probes;
mod quotient;

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::criteria::CouplingParams;
use crate::fields::{
    analyze_potential, io::read_fields, trial_phi, EnergyParts, FieldError, Field2D, Grid2D, PotentialSpec, Potentials,
};
use crate::townes::{solve_townes, RadialProfile, TownesError};

use engine::{Engine, EngineConfig, Objective, Stop};

pub use probes::{scaling_escape_test, uniqueness_probe, EscapeOutcome, DEFAULT_ESCAPE_LAMBDAS};
pub use quotient::{estimate_gn_quotient, quotient_minimizer, QuotientResult};

#[derive(Debug, Error)]
pub enum MinimizeError {
    #[error("no convergence after {iters} iterations (residual {residual:e})")]
    MaxItersExceeded { iters: usize, residual: f64 },
    #[error("energy fell below the floor {floor} after {iters} iterations")]
    EnergyDiverging { floor: f64, iters: usize },
    #[error("non-finite value after {iters} iterations")]
    NaNDetected { iters: usize },
    #[error("quotient estimate did not converge: {0}")]
    NonConvergence(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Townes(#[from] TownesError),
}

/// Descent scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    #[default]
    Cg,
    Flow,
}

/// Starting pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Init {
    /// `exp(−|x−c|²/(2w²))` in both components; `c` defaults to the first
    /// flattest zero of the trap, `w` to 1
    Gaussian {
        #[serde(default)]
        center: Option<[f64; 2]>,
        #[serde(default)]
        width: Option<f64>,
    },
    /// the concentrated trial state at `center` with scale `tau`
    TownesSeeded { center: [f64; 2], tau: f64 },
    /// a field pair on disk (binary plus sidecar)
    WarmStart { path: PathBuf },
}

impl Default for Init {
    fn default() -> Self {
        Init::Gaussian {
            center: None,
            width: None,
        }
    }
}

fn default_max_iters() -> usize {
    20_000
}

fn default_grad_tol() -> f64 {
    1e-7
}

fn default_floor() -> f64 {
    -1e6
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowConfig {
    /// pseudo-time step of the flow scheme; `0.01·h²` when absent
    #[serde(default)]
    pub dt: Option<f64>,
    #[serde(default = "default_max_iters")]
    pub max_iters: usize,
    #[serde(default = "default_grad_tol")]
    pub grad_tol: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub init: Init,
    #[serde(default)]
    pub scheme: Scheme,
    #[serde(default = "default_floor")]
    pub energy_floor: f64,
}

impl Default for FlowConfig {
    fn default() -> Self {
        Self {
            dt: None,
            max_iters: default_max_iters(),
            grad_tol: default_grad_tol(),
            seed: 0,
            init: Init::default(),
            scheme: Scheme::Cg,
            energy_floor: default_floor(),
        }
    }
}

impl FlowConfig {
    pub fn validate(&self) -> Result<(), MinimizeError> {
        if let Some(dt) = self.dt {
            if !(dt > 0.0 && dt.is_finite()) {
                return Err(MinimizeError::InvalidConfig(format!("dt must be positive (got {dt})")));
            }
        }
        if !(self.grad_tol > 0.0 && self.grad_tol.is_finite()) {
            return Err(MinimizeError::InvalidConfig(format!(
                "grad_tol must be positive (got {})",
                self.grad_tol
            )));
        }
        Ok(())
    }

    pub fn with_tol(mut self, grad_tol: f64) -> Self {
        self.grad_tol = grad_tol;
        self
    }
}

#[derive(Debug, Clone)]
pub struct MinimizeResult {
    pub u1: Field2D,
    pub u2: Field2D,
    pub energy: f64,
    pub mu1: f64,
    pub mu2: f64,
    pub residual: f64,
    pub iters: usize,
    pub max1: [f64; 2],
    pub max2: [f64; 2],
    pub l4_1: f64,
    pub l4_2: f64,
    pub diff2: f64,
    pub parts: EnergyParts,
    /// objective after every accepted step, when requested
    pub trace: Vec<f64>,
}

/// The scalar part of a [`MinimizeResult`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MinimizeSummary {
    pub energy: f64,
    pub mu1: f64,
    pub mu2: f64,
    pub residual: f64,
    pub iters: usize,
    pub max1: [f64; 2],
    pub max2: [f64; 2],
    pub l4_1: f64,
    pub l4_2: f64,
    pub diff2: f64,
    pub kinetic: [f64; 2],
    pub potential: [f64; 2],
}

impl MinimizeResult {
    pub fn summary(&self) -> MinimizeSummary {
        MinimizeSummary {
            energy: self.energy,
            mu1: self.mu1,
            mu2: self.mu2,
            residual: self.residual,
            iters: self.iters,
            max1: self.max1,
            max2: self.max2,
            l4_1: self.l4_1,
            l4_2: self.l4_2,
            diff2: self.diff2,
            kinetic: self.parts.kinetic,
            potential: self.parts.potential,
        }
    }
}

/// Single-component minimizer of `E_a(u) = ∫|∇u|² + Vu² − (a/2)∫u⁴`.
#[derive(Debug, Clone)]
pub struct SingleResult {
    pub u: Field2D,
    pub energy: f64,
    pub mu: f64,
    pub residual: f64,
    pub iters: usize,
}

/// Starting pair described by `init`.
pub fn initial_pair(init: &Init, pot: &PotentialSpec, grid: &Grid2D) -> Result<(Field2D, Field2D), MinimizeError> {
    match init {
        Init::Gaussian { center, width } => {
            let c = match center {
                Some(c) => *c,
                None => analyze_potential(pot)
                    .ok()
                    .and_then(|a| a.z_set.first().copied())
                    .unwrap_or([0.0, 0.0]),
            };
            let w = width.unwrap_or(1.0);
            if !(w > 0.0) {
                return Err(MinimizeError::InvalidConfig(format!("gaussian width must be positive (got {w})")));
            }
            let f = Field2D::from_fn(*grid, |x, y| (-((x - c[0]).powi(2) + (y - c[1]).powi(2)) / (2.0 * w * w)).exp())
                .normalized();
            Ok((f.clone(), f))
        }
        Init::TownesSeeded { center, tau } => {
            let q = seed_profile()?;
            let r = crate::fields::default_cutoff_radius(*center, grid);
            let f = trial_phi(*center, *tau, r, &q, grid)?;
            Ok((f.clone(), f))
        }
        Init::WarmStart { path } => {
            let (a, b) = read_fields(path)?;
            if a.grid != *grid {
                return Err(MinimizeError::InvalidConfig(format!(
                    "warm start lives on {:?}, run asks for {grid:?}",
                    a.grid
                )));
            }
            Ok((a.normalized(), b.normalized()))
        }
    }
}

/// Ground-state profile for seeding; accurate well beyond what a start needs.
pub(crate) fn seed_profile() -> Result<RadialProfile, TownesError> {
    solve_townes(20.0, 2048, 1e-9)
}

/// Minimize the coupled energy starting from `cfg.init`.
pub fn minimize(params: &CouplingParams, pot: &PotentialSpec, grid: &Grid2D, cfg: &FlowConfig) -> Result<MinimizeResult, MinimizeError> {
    params.validate().map_err(|e| MinimizeError::InvalidConfig(e.to_string()))?;
    pot.validate()?;
    grid.validate()?;
    cfg.validate()?;
    let (u1, u2) = initial_pair(&cfg.init, pot, grid)?;
    let v = Potentials::from_spec(pot, grid);
    minimize_from(params, &v, u1, u2, cfg)
}

/// Minimize from an explicit starting pair on pre-evaluated traps.
pub fn minimize_from(params: &CouplingParams, pot: &Potentials, u1: Field2D, u2: Field2D, cfg: &FlowConfig) -> Result<MinimizeResult, MinimizeError> {
    minimize_impl(params, pot, u1, u2, cfg, false)
}

/// As [`minimize_from`], keeping the energy after every accepted step.
pub fn minimize_traced(params: &CouplingParams, pot: &Potentials, u1: Field2D, u2: Field2D, cfg: &FlowConfig) -> Result<MinimizeResult, MinimizeError> {
    minimize_impl(params, pot, u1, u2, cfg, true)
}

fn minimize_impl(
    params: &CouplingParams,
    pot: &Potentials,
    u1: Field2D,
    u2: Field2D,
    cfg: &FlowConfig,
    trace: bool,
) -> Result<MinimizeResult, MinimizeError> {
    cfg.validate()?;
    if u1.grid != u2.grid || pot.v1.dim() != (u1.grid.n, u1.grid.n) {
        return Err(FieldError::InvalidInput("fields and traps live on different grids".into()).into());
    }
    let mut eng = Engine::new(Objective::Energy(*params), pot, u1, u2);
    eng.record_trace = trace;
    match cfg.scheme {
        Scheme::Cg => drive_cg(&mut eng, cfg)?,
        Scheme::Flow => flow::drive(&mut eng, params, cfg)?,
    }
    Ok(finish(eng, params))
}

/// CG steps between line searches along dilation and translations.
const GENERATORS_EVERY: usize = 5;

fn engine_config(cfg: &FlowConfig) -> EngineConfig {
    EngineConfig {
        max_iters: cfg.max_iters,
        grad_tol: cfg.grad_tol,
        floor: cfg.energy_floor,
        refresh_every: 25,
        gauge: None,
        min_share: None,
        generators_every: Some(GENERATORS_EVERY),
    }
}

/// Run CG to convergence, then make both components non-negative and polish
/// if that moved them off the tolerance.
fn drive_cg(eng: &mut Engine, cfg: &FlowConfig) -> Result<(), MinimizeError> {
    let ec = engine_config(cfg);
    for _ in 0..4 {
        let (stop, res) = eng.run(&ec);
        match stop {
            Stop::Converged => {}
            Stop::Floor => {
                return Err(MinimizeError::EnergyDiverging {
                    floor: cfg.energy_floor,
                    iters: eng.iters,
                })
            }
            Stop::NaN => return Err(MinimizeError::NaNDetected { iters: eng.iters }),
            Stop::MaxIters | Stop::Stalled | Stop::Dichotomy => {
                return Err(MinimizeError::MaxItersExceeded {
                    iters: eng.iters,
                    residual: res,
                })
            }
        }
        eng.take_abs();
        let ints = eng.integrals();
        let (g, _) = eng.tangent_gradient(&ints);
        if eng.norm(&g[0]).max(eng.norm(&g[1])) < cfg.grad_tol {
            return Ok(());
        }
    }
    Err(MinimizeError::MaxItersExceeded {
        iters: eng.iters,
        residual: f64::NAN,
    })
}

fn finish(eng: Engine, params: &CouplingParams) -> MinimizeResult {
    let ints = eng.integrals();
    let (g, proj) = eng.tangent_gradient(&ints);
    let residual = eng.norm(&g[0]).max(eng.norm(&g[1]));
    let parts = EnergyParts {
        kinetic: ints.kinetic,
        potential: ints.potential,
        quartic: ints.quartic,
        cross: ints.cross,
    };
    let (u1, u2) = eng.fields();
    MinimizeResult {
        max1: u1.max_location(),
        max2: u2.max_location(),
        energy: parts.total(params),
        mu1: 0.5 * proj[0],
        mu2: 0.5 * proj[1],
        residual,
        iters: eng.iters,
        l4_1: parts.quartic[0],
        l4_2: parts.quartic[1],
        diff2: parts.diff2(),
        parts,
        trace: eng.trace,
        u1,
        u2,
    }
}

/// `e(a) = inf E_a` for one component in the trap `v`.
pub fn minimize_single(a: f64, v: &ndarray::Array2<f64>, grid: &Grid2D, cfg: &FlowConfig) -> Result<SingleResult, MinimizeError> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(MinimizeError::InvalidConfig(format!("interaction strength must be positive (got {a})")));
    }
    grid.validate()?;
    let pot = Potentials {
        v1: v.clone(),
        v2: v.clone(),
    };
    let start = match &cfg.init {
        Init::Gaussian { center, width } => {
            let c = center.unwrap_or_else(|| {
                let f = Field2D {
                    grid: *grid,
                    values: v.mapv(|x| -x),
                };
                f.max_location()
            });
            let w = width.unwrap_or(1.0);
            Field2D::from_fn(*grid, |x, y| (-((x - c[0]).powi(2) + (y - c[1]).powi(2)) / (2.0 * w * w)).exp())
        }
        other => initial_pair(other, &PotentialSpec::harmonic(), grid)?.0,
    };
    // two identical uncoupled copies; each carries half of the total
    let params = CouplingParams { b1: a, b2: a, beta: 0.0 };
    let r = minimize_impl(&params, &pot, start.clone(), start, cfg, false)?;
    Ok(SingleResult {
        energy: 0.5 * r.energy,
        mu: r.mu1,
        residual: r.residual,
        iters: r.iters,
        u: r.u1,
    })
}

fn check_masses(u1: &Field2D, u2: &Field2D) -> Result<(), FieldError> {
    for (i, u) in [u1, u2].into_iter().enumerate() {
        let m = u.mass();
        if !((m - 1.0).abs() <= crate::fields::MASS_TOL) {
            return Err(FieldError::MassViolation { component: i + 1, mass: m });
        }
    }
    Ok(())
}

/// Both evaluations of the multipliers: `(⟨gᵢ,uᵢ⟩/2, formula route)` where
/// the formula route is `E^i_{aᵢ}(uᵢ) − (aᵢ/2)∫uᵢ⁴ + β∫(uᵢ² − uⱼ²)uᵢ²`.
pub fn multiplier_routes(
    u1: &Field2D,
    u2: &Field2D,
    params: &CouplingParams,
    pot: &Potentials,
) -> Result<([f64; 2], [f64; 2]), FieldError> {
    check_masses(u1, u2)?;
    let mut sp = crate::fields::Spectral::new(&u1.grid);
    let (g1, g2) = crate::fields::gradient(u1, u2, params, pot, &mut sp)?;
    let inner = [
        0.5 * u1.grid.cell_area() * crate::fields::dot(&g1, &u1.values),
        0.5 * u1.grid.cell_area() * crate::fields::dot(&g2, &u2.values),
    ];
    let p = crate::fields::energy_parts(u1, u2, pot, &mut sp);
    let a = [params.a1(), params.a2()];
    let mut formula = [0.0; 2];
    for i in 0..2 {
        let single = p.kinetic[i] + p.potential[i] - 0.5 * a[i] * p.quartic[i];
        formula[i] = single - 0.5 * a[i] * p.quartic[i] + params.beta * (p.quartic[i] - p.cross);
    }
    Ok((inner, formula))
}

/// Lagrange multipliers `(μ₁, μ₂)` of a unit-mass pair.
pub fn multipliers(u1: &Field2D, u2: &Field2D, params: &CouplingParams, pot: &Potentials) -> Result<(f64, f64), FieldError> {
    let (inner, _) = multiplier_routes(u1, u2, params, pot)?;
    Ok((inner[0], inner[1]))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> CouplingParams {
        // about (0.1, 0.1, 0.05)·a*
        CouplingParams::new(1.17, 1.17, 0.585).unwrap()
    }

    #[test]
    fn harmonic_small_coupling_converges() {
        let g = Grid2D::new(64, 8.0).unwrap();
        let cfg = FlowConfig::default().with_tol(1e-8);
        let r = minimize(&small(), &PotentialSpec::harmonic(), &g, &cfg).unwrap();
        assert!(r.residual < 1e-8);
        assert!(r.energy > 0.0 && r.energy < 4.0, "{}", r.energy);
        assert!((r.u1.mass() - 1.0).abs() < 1e-12 && (r.u2.mass() - 1.0).abs() < 1e-12);
        let top = r.u1.values.iter().copied().fold(0.0, f64::max);
        assert!(r.u1.values.iter().all(|&v| v >= -1e-6 * top));
        assert!(r.diff2 <= 2.0 / small().beta * r.energy);
        let (ip, f) = multiplier_routes(&r.u1, &r.u2, &small(), &Potentials::from_spec(&PotentialSpec::harmonic(), &g)).unwrap();
        for i in 0..2 {
            assert!((ip[i] - f[i]).abs() < 1e-8);
        }
        assert!((ip[0] - r.mu1).abs() < 1e-8);
    }

    #[test]
    fn weak_single_component_tends_to_oscillator_ground_energy() {
        let g = Grid2D::new(64, 8.0).unwrap();
        let v = Potentials::from_spec(&PotentialSpec::harmonic(), &g).v1;
        let cfg = FlowConfig::default().with_tol(1e-9);
        let e = minimize_single(1e-6, &v, &g, &cfg).unwrap();
        assert!((e.energy - 2.0).abs() < 1e-6, "{}", e.energy);
        assert!((e.mu - 2.0).abs() < 1e-6);
    }

    #[test]
    fn flow_scheme_agrees_with_cg() {
        let g = Grid2D::new(64, 8.0).unwrap();
        let cg = minimize(&small(), &PotentialSpec::harmonic(), &g, &FlowConfig::default().with_tol(1e-8)).unwrap();
        let cfg = FlowConfig {
            dt: Some(0.005),
            scheme: Scheme::Flow,
            grad_tol: 1e-6,
            ..FlowConfig::default()
        };
        let fl = minimize(&small(), &PotentialSpec::harmonic(), &g, &cfg).unwrap();
        assert!(fl.residual < 1e-6);
        assert!((fl.energy - cg.energy).abs() < 1e-9, "{} vs {}", fl.energy, cg.energy);
    }

    #[test]
    fn config_json_rejects_unknown_keys() {
        let ok: FlowConfig = serde_json::from_str(r#"{"grad_tol": 1e-6, "init": {"kind": "townes-seeded", "center": [0, 0], "tau": 3}}"#).unwrap();
        assert_eq!(ok.init, Init::TownesSeeded { center: [0.0, 0.0], tau: 3.0 });
        assert_eq!(ok.max_iters, 20_000);
        assert!(serde_json::from_str::<FlowConfig>(r#"{"grad_tl": 1e-6}"#).is_err());
        let bad = FlowConfig { dt: Some(-1.0), ..FlowConfig::default() };
        assert!(bad.validate().is_err());
    }
}
