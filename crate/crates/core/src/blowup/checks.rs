//! Comparisons of sweep output with the predicted limits.

use serde::{Deserialize, Serialize};

use super::{BlowupError, SweepRecord};
use crate::fields::{Field2D, PotentialAnalysis};
use crate::townes::{lambda_star, limit_constant, RadialProfile, TownesConstants};

/// Distances of both components to the predicted limiting profile.
///
/// With `ε = eps_raw^{1/(p₀+2)}` and `xᵢ` the refined maximum, the blown-up
/// `wᵢ(x) = ε·uᵢ(εx + xᵢ)` is compared with `λQ(λ|x|)/‖Q‖₂`. That map is an
/// isometry of L², so the distance is taken in the original coordinates
/// against `(λ/ε)Q(λ|y − xᵢ|/ε)/‖Q‖₂`, with no resampling.
pub fn profile_distances(
    u1: &Field2D,
    u2: &Field2D,
    eps_raw: f64,
    profile: &RadialProfile,
    constants: &TownesConstants,
    analysis: &PotentialAnalysis,
) -> Result<[f64; 2], BlowupError> {
    let eps = eps_raw.powf(1.0 / (analysis.p0 + 2.0));
    let lam = lambda_star(analysis.p0, analysis.gamma, constants)?;
    let h = u1.grid.spacing();
    let core = eps / lam;
    if core < 2.0 * h {
        return Err(BlowupError::ResolutionExceeded {
            eps_raw,
            points: core / h,
            min: 2.0,
        });
    }
    let amp = 1.0 / (core * constants.a_star.sqrt());
    let one = |u: &Field2D| {
        let c = u.max_location();
        let target = Field2D::from_fn(u.grid, |x, y| {
            amp * profile.eval(((x - c[0]).powi(2) + (y - c[1]).powi(2)).sqrt() / core)
        });
        u.l2_distance(&target)
    };
    Ok([one(u1), one(u2)])
}

/// Larger of the two [`profile_distances`].
pub fn profile_distance(
    u1: &Field2D,
    u2: &Field2D,
    eps_raw: f64,
    profile: &RadialProfile,
    constants: &TownesConstants,
    analysis: &PotentialAnalysis,
) -> Result<f64, BlowupError> {
    profile_distances(u1, u2, eps_raw, profile, constants, analysis).map(|[a, b]| a.max(b))
}

/// `energy / eps_raw^{p₀/(p₀+2)}` over the predicted limit, per record.
pub fn limit_constant_check(
    records: &[SweepRecord],
    constants: &TownesConstants,
    analysis: &PotentialAnalysis,
) -> Result<Vec<f64>, BlowupError> {
    let p0 = analysis.p0;
    let c = limit_constant(p0, analysis.gamma, constants)?;
    Ok(records
        .iter()
        .map(|r| r.energy / r.eps_raw.powf(p0 / (p0 + 2.0)) / c)
        .collect())
}

/// `μᵢ / (−(aᵢ/2)∫uᵢ⁴)` for both components; tends to 1.
pub fn mu_ratio(record: &SweepRecord) -> [f64; 2] {
    let a1 = record.b1 + record.beta;
    let a2 = record.b2 + record.beta;
    [
        record.mu1 / (-0.5 * a1 * record.l4_1),
        record.mu2 / (-0.5 * a2 * record.l4_2),
    ]
}

/// `∫uᵢ⁴·ε²` over its predicted limit `2λ²/a*`.
pub fn l4_scale_ratio(record: &SweepRecord, constants: &TownesConstants, analysis: &PotentialAnalysis) -> Result<[f64; 2], BlowupError> {
    let p0 = analysis.p0;
    let lam = lambda_star(p0, analysis.gamma, constants)?;
    let eps2 = record.eps_raw.powf(2.0 / (p0 + 2.0));
    let lim = 2.0 * lam * lam / constants.a_star;
    Ok([record.l4_1 * eps2 / lim, record.l4_2 * eps2 / lim])
}

/// Normalized offset treated as zero.
const SETTLED: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationReport {
    /// member of `𝒵` nearest the final maxima
    pub x_bar0: [f64; 2],
    /// distance of the farther final maximum to `x_bar0`
    pub final_distance: f64,
    pub spacing: f64,
    /// `max_i |xᵢ − x̄₀| / ε` per record
    pub normalized_offsets: Vec<f64>,
    pub converged: bool,
    pub offsets_decreasing: bool,
    pub pass: bool,
}

/// Where the maxima go. `spacing` is the grid spacing of the sweep.
pub fn concentration_check(records: &[SweepRecord], analysis: &PotentialAnalysis, spacing: f64) -> ConcentrationReport {
    let dist = |a: [f64; 2], b: [f64; 2]| ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt();
    let Some(last) = records.last() else {
        return ConcentrationReport {
            x_bar0: analysis.z_set[0],
            final_distance: f64::NAN,
            spacing,
            normalized_offsets: vec![],
            converged: false,
            offsets_decreasing: false,
            pass: false,
        };
    };
    let mid = [0.5 * (last.max1[0] + last.max2[0]), 0.5 * (last.max1[1] + last.max2[1])];
    let z = analysis.nearest_z(mid);
    let final_distance = dist(last.max1, z).max(dist(last.max2, z));
    let offsets: Vec<f64> = records
        .iter()
        .map(|r| {
            let eps = r.eps_raw.powf(1.0 / (analysis.p0 + 2.0));
            dist(r.max1, z).max(dist(r.max2, z)) / eps
        })
        .collect();
    let converged = final_distance < spacing;
    // maxima sitting on the zero to round-off have nothing left to shrink
    let settled = offsets.iter().all(|&o| o < SETTLED);
    let offsets_decreasing = offsets.len() >= 2 && (offsets[offsets.len() - 1] < offsets[0] || settled);
    ConcentrationReport {
        x_bar0: z,
        final_distance,
        spacing,
        normalized_offsets: offsets,
        converged,
        offsets_decreasing,
        pass: converged && offsets_decreasing,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{analyze_potential, Grid2D, PotentialSpec};
    use crate::townes::{compute_constants, solve_townes};

    fn rec(eps_raw: f64, max: [f64; 2]) -> SweepRecord {
        SweepRecord {
            eps_raw,
            b1: 5.0,
            b2: 5.0,
            beta: 1.0,
            energy: 1.0,
            l4_1: 2.0,
            l4_2: 2.0,
            diff2: 0.0,
            mu1: -6.0,
            mu2: -3.0,
            max1: max,
            max2: max,
            profile_dist: 0.0,
        }
    }

    #[test]
    fn exact_rescaled_profile_has_zero_distance() {
        let q = solve_townes(20.0, 2048, 1e-9).unwrap();
        let c = compute_constants(&q, &[2.0]).unwrap();
        let an = analyze_potential(&PotentialSpec::harmonic()).unwrap();
        let g = Grid2D::new(256, 8.0).unwrap();
        let eps_raw: f64 = 0.01;
        let lam = lambda_star(2.0, 2.0, &c).unwrap();
        let core = eps_raw.powf(0.25) / lam;
        let u = Field2D::from_fn(g, |x, y| q.eval((x * x + y * y).sqrt() / core) / (core * c.a_star.sqrt()));
        let d = profile_distances(&u, &u, eps_raw, &q, &c, &an).unwrap();
        assert!(d[0] < 1e-6 && d[1] == d[0], "{d:?}");
        // a wrong scale is seen
        let d = profile_distances(&u, &u, 0.02, &q, &c, &an).unwrap();
        assert!(d[0] > 1e-2);
    }

    #[test]
    fn ratios_and_concentration() {
        let r = rec(1e-2, [0.0, 0.0]);
        let m = mu_ratio(&r);
        assert!((m[0] - 1.0).abs() < 1e-15 && (m[1] - 0.5).abs() < 1e-15);
        let an = analyze_potential(&PotentialSpec::harmonic()).unwrap();
        let recs = vec![rec(1e-1, [0.05, 0.0]), rec(1e-2, [0.01, 0.0]), rec(1e-3, [0.001, 0.0])];
        let rep = concentration_check(&recs, &an, 0.03);
        assert!(rep.pass, "{rep:?}");
        let recs = vec![rec(1e-1, [0.001, 0.0]), rec(1e-3, [0.02, 0.0])];
        assert!(!concentration_check(&recs, &an, 0.03).offsets_decreasing);
    }
}
