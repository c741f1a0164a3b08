//! The continuation sweep and its CSV records.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{profile_distance, BlowupError};
use crate::criteria::{classify, CouplingParams, RegionTag};
use crate::fields::{analyze_potential, default_cutoff_radius, rescale_about, trial_phi, Field2D, Grid2D, PotentialSpec, Potentials};
use crate::minimizer::{minimize_from, FlowConfig};
use crate::townes::{lambda_star, RadialProfile, TownesConstants};

/// Smallest accepted core diameter `2ε`, in grid spacings.
pub const MIN_CORE_POINTS: f64 = 16.0;

/// Largest value tolerated on the outermost ring of nodes.
const BOUNDARY_TOL: f64 = 1e-8;

/// How `(b₁, b₂)` depends on `eps_raw = a* − (a₁+a₂)/2`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SweepPath {
    /// `b₁ = b₂ = a* − β − eps_raw`
    #[default]
    Symmetric,
    /// `bᵢ = a* − β − eps_raw·(1 ± split)`; experimental
    Skewed { split: f64 },
}

impl SweepPath {
    pub fn params(&self, a_star: f64, beta: f64, eps_raw: f64) -> CouplingParams {
        let base = a_star - beta;
        let (s1, s2) = match self {
            SweepPath::Symmetric => (1.0, 1.0),
            SweepPath::Skewed { split } => (1.0 + split, 1.0 - split),
        };
        CouplingParams {
            b1: base - eps_raw * s1,
            b2: base - eps_raw * s2,
            beta,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    /// absolute interspecies strength
    pub beta: f64,
    /// strictly decreasing values of `a* − (a₁+a₂)/2`
    pub eps_list: Vec<f64>,
    #[serde(default)]
    pub path: SweepPath,
    pub pot: PotentialSpec,
    pub grid: Grid2D,
    #[serde(default)]
    pub cfg: FlowConfig,
}

impl SweepSpec {
    /// `count` points from `hi` down to `lo`, equally spaced in `log eps_raw`.
    pub fn geometric_eps(hi: f64, lo: f64, count: usize) -> Vec<f64> {
        if count == 1 {
            return vec![hi];
        }
        let (lh, ll) = (hi.ln(), lo.ln());
        (0..count)
            .map(|k| (lh + (ll - lh) * k as f64 / (count - 1) as f64).exp())
            .collect()
    }

    pub fn validate(&self, a_star: f64) -> Result<(), BlowupError> {
        if !(self.beta > 0.0 && self.beta < a_star) {
            return Err(BlowupError::InvalidSpec(format!("beta must lie in (0, a*) (got {})", self.beta)));
        }
        if self.eps_list.is_empty() {
            return Err(BlowupError::InvalidSpec("eps_list is empty".into()));
        }
        if self.eps_list.windows(2).any(|w| !(w[1] < w[0])) {
            return Err(BlowupError::InvalidSpec("eps_list must be strictly decreasing".into()));
        }
        if self.eps_list.iter().any(|&e| !(e > 0.0 && e < 0.5 * a_star)) {
            return Err(BlowupError::InvalidSpec("every eps_raw must lie in (0, a*/2)".into()));
        }
        if let SweepPath::Skewed { split } = self.path {
            if !(split.abs() < 1.0) {
                return Err(BlowupError::InvalidSpec(format!("split must lie in (−1, 1) (got {split})")));
            }
        }
        for &e in &self.eps_list {
            let p = self.path.params(a_star, self.beta, e);
            if !(p.b1 > 0.0 && p.b2 > 0.0) {
                return Err(BlowupError::InvalidSpec(format!("path leaves b > 0 at eps_raw={e}")));
            }
        }
        self.pot.validate()?;
        self.grid.validate()?;
        self.cfg.validate()?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub eps_raw: f64,
    pub b1: f64,
    pub b2: f64,
    pub beta: f64,
    pub energy: f64,
    pub l4_1: f64,
    pub l4_2: f64,
    pub diff2: f64,
    pub mu1: f64,
    pub mu2: f64,
    pub max1: [f64; 2],
    pub max2: [f64; 2],
    pub profile_dist: f64,
}

/// Run one sweep: each point starts from the previous solution dilated about
/// its maximum by the predicted core shrinkage, the first from the
/// concentrated trial state at the first flattest zero.
pub fn run_sweep(spec: &SweepSpec, profile: &RadialProfile, constants: &TownesConstants) -> Result<Vec<SweepRecord>, BlowupError> {
    let a_star = constants.a_star;
    spec.validate(a_star)?;
    let analysis = analyze_potential(&spec.pot)?;
    let p0 = analysis.p0;
    let mut constants = constants.clone();
    constants.ensure_moment(profile, p0)?;
    let constants = &constants;
    let lam = lambda_star(p0, analysis.gamma, constants)?;
    let z = analysis.z_set[0];
    let grid = spec.grid;
    let h = grid.spacing();
    let pot = Potentials::from_spec(&spec.pot, &grid);

    let mut prev: Option<(Field2D, Field2D, f64)> = None;
    let mut out = Vec::with_capacity(spec.eps_list.len());
    for &eps_raw in &spec.eps_list {
        let eps = eps_raw.powf(1.0 / (p0 + 2.0));
        let points = 2.0 * eps / h;
        if points < MIN_CORE_POINTS {
            return Err(BlowupError::ResolutionExceeded {
                eps_raw,
                points,
                min: MIN_CORE_POINTS,
            });
        }
        let params = spec.path.params(a_star, spec.beta, eps_raw);
        let label = classify(&params, a_star);
        if !matches!(label.tag, RegionTag::Existence | RegionTag::SegmentEqualB) {
            return Err(BlowupError::NotCovered {
                eps_raw,
                tag: label.tag.as_str().to_string(),
            });
        }
        let (i1, i2) = match prev.take() {
            None => {
                let f = trial_phi(z, lam / eps, default_cutoff_radius(z, &grid), profile, &grid)?;
                (f.clone(), f)
            }
            Some((u1, u2, eps_prev)) => {
                let s = eps_prev / eps;
                let c1 = u1.max_location();
                let c2 = u2.max_location();
                (rescale_about(&u1, s, c1)?.normalized(), rescale_about(&u2, s, c2)?.normalized())
            }
        };
        let r = minimize_from(&params, &pot, i1, i2, &spec.cfg)?;
        let edge = r.u1.boundary_max().max(r.u2.boundary_max());
        if edge > BOUNDARY_TOL {
            return Err(BlowupError::BoundaryMass { eps_raw, value: edge });
        }
        let dist = profile_distance(&r.u1, &r.u2, eps_raw, profile, constants, &analysis)?;
        out.push(SweepRecord {
            eps_raw,
            b1: params.b1,
            b2: params.b2,
            beta: params.beta,
            energy: r.energy,
            l4_1: r.l4_1,
            l4_2: r.l4_2,
            diff2: r.diff2,
            mu1: r.mu1,
            mu2: r.mu2,
            max1: r.max1,
            max2: r.max2,
            profile_dist: dist,
        });
        prev = Some((r.u1, r.u2, eps));
    }
    Ok(out)
}

/// Independent sweeps on up to `jobs` threads; results keep the input order.
pub fn run_sweeps(
    specs: &[SweepSpec],
    profile: &RadialProfile,
    constants: &TownesConstants,
    jobs: usize,
) -> Vec<Result<Vec<SweepRecord>, BlowupError>> {
    let jobs = jobs.max(1).min(specs.len().max(1));
    let mut slots: Vec<Option<Result<Vec<SweepRecord>, BlowupError>>> = (0..specs.len()).map(|_| None).collect();
    let next = std::sync::atomic::AtomicUsize::new(0);
    let done = std::sync::Mutex::new(&mut slots);
    std::thread::scope(|s| {
        for _ in 0..jobs {
            s.spawn(|| loop {
                let k = next.fetch_add(1, std::sync::atomic::Ordering::SeqCst);
                if k >= specs.len() {
                    break;
                }
                let r = run_sweep(&specs[k], profile, constants);
                done.lock().expect("no worker panics while holding the lock")[k] = Some(r);
            });
        }
    });
    slots.into_iter().map(|r| r.expect("every index is claimed once")).collect()
}

pub const CSV_HEADER: &str = "eps_raw,b1,b2,beta,energy,l4_1,l4_2,diff2,mu1,mu2,max1x,max1y,max2x,max2y,profile_dist";

/// Records as CSV, every float with 17 significant digits.
pub fn records_to_csv(records: &[SweepRecord]) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for r in records {
        let vals = [
            r.eps_raw,
            r.b1,
            r.b2,
            r.beta,
            r.energy,
            r.l4_1,
            r.l4_2,
            r.diff2,
            r.mu1,
            r.mu2,
            r.max1[0],
            r.max1[1],
            r.max2[0],
            r.max2[1],
            r.profile_dist,
        ];
        for (k, v) in vals.iter().enumerate() {
            if k > 0 {
                s.push(',');
            }
            write!(s, "{v:.16e}").expect("writing to a String");
        }
        s.push('\n');
    }
    s
}

pub fn read_records_csv(text: &str) -> Result<Vec<SweepRecord>, BlowupError> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| BlowupError::Records("empty file".into()))?;
    if header.trim() != CSV_HEADER {
        return Err(BlowupError::Records(format!("unexpected header {header:?}")));
    }
    lines
        .enumerate()
        .map(|(k, line)| {
            let v = line
                .split(',')
                .map(|f| f.trim().parse::<f64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| BlowupError::Records(format!("row {}: {e}", k + 1)))?;
            if v.len() != 15 {
                return Err(BlowupError::Records(format!("row {} has {} columns, expected 15", k + 1, v.len())));
            }
            Ok(SweepRecord {
                eps_raw: v[0],
                b1: v[1],
                b2: v[2],
                beta: v[3],
                energy: v[4],
                l4_1: v[5],
                l4_2: v[6],
                diff2: v[7],
                mu1: v[8],
                mu2: v[9],
                max1: [v[10], v[11]],
                max2: [v[12], v[13]],
                profile_dist: v[14],
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(e: f64) -> SweepRecord {
        SweepRecord {
            eps_raw: e,
            b1: 1.0 / 3.0,
            b2: 2.0,
            beta: 0.1,
            energy: std::f64::consts::PI,
            l4_1: 1e300,
            l4_2: 5e-324,
            diff2: 0.0,
            mu1: -7.25,
            mu2: -1e-17,
            max1: [0.1, -0.2],
            max2: [0.0, 3.0],
            profile_dist: 0.04,
        }
    }

    #[test]
    fn csv_roundtrip_is_exact() {
        let recs = vec![record(0.1), record(0.01)];
        let text = records_to_csv(&recs);
        assert!(text.starts_with(CSV_HEADER));
        assert_eq!(read_records_csv(&text).unwrap(), recs);
        assert!(read_records_csv("a,b\n1,2\n").is_err());
    }

    #[test]
    fn geometric_grid_and_paths() {
        let e = SweepSpec::geometric_eps(1e-1, 1e-3, 9);
        assert_eq!(e.len(), 9);
        assert!((e[0] - 0.1).abs() < 1e-15 && (e[8] - 1e-3).abs() < 1e-17);
        assert!((e[1] / e[0] - 10f64.powf(-0.25)).abs() < 1e-14);
        let p = SweepPath::Skewed { split: 0.5 }.params(10.0, 4.0, 0.2);
        assert!((0.5 * (p.a1() + p.a2()) - (10.0 - 0.2)).abs() < 1e-14);
        let q = SweepPath::Symmetric.params(10.0, 4.0, 0.2);
        assert_eq!(q.b1, q.b2);
    }
}
