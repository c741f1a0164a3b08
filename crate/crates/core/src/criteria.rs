//! Closed-form existence classification of the coupling triple `(b₁, b₂, β)`
//! and the scalar functions behind it.
//!
//! `a*` is always an argument. It comes from the Townes artifact, never from
//! a constant baked into this module.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numeric::scalar::{brent_min, brent_root};

#[derive(Debug, Error)]
pub enum CriteriaError {
    #[error("coupling strengths must be positive and finite (got b1={b1}, b2={b2}, beta={beta})")]
    InvalidParams { b1: f64, b2: f64, beta: f64 },
}

/// Intra-species strengths `b₁, b₂` and the inter-species strength `β`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingParams {
    pub b1: f64,
    pub b2: f64,
    pub beta: f64,
}

impl CouplingParams {
    pub fn new(b1: f64, b2: f64, beta: f64) -> Result<Self, CriteriaError> {
        let p = Self { b1, b2, beta };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), CriteriaError> {
        let ok = |v: f64| v > 0.0 && v.is_finite();
        if ok(self.b1) && ok(self.b2) && ok(self.beta) {
            Ok(())
        } else {
            Err(CriteriaError::InvalidParams {
                b1: self.b1,
                b2: self.b2,
                beta: self.beta,
            })
        }
    }

    /// `a₁ = b₁ + β`
    pub fn a1(&self) -> f64 {
        self.b1 + self.beta
    }

    /// `a₂ = b₂ + β`
    pub fn a2(&self) -> f64 {
        self.b2 + self.beta
    }

    fn distance(&self, other: &Self) -> f64 {
        ((self.b1 - other.b1).powi(2) + (self.b2 - other.b2).powi(2) + (self.beta - other.beta).powi(2)).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RegionTag {
    Existence,
    NoMinimizer,
    BorderlineUnequal,
    SegmentEqualB,
    Indeterminate,
}

impl RegionTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            RegionTag::Existence => "Existence",
            RegionTag::NoMinimizer => "NoMinimizer",
            RegionTag::BorderlineUnequal => "BorderlineUnequal",
            RegionTag::SegmentEqualB => "SegmentEqualB",
            RegionTag::Indeterminate => "Indeterminate",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionLabel {
    pub tag: RegionTag,
    pub detail: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuotientBounds {
    pub lower: f64,
    pub upper: f64,
}

/// `f(t) = (a*/2)(1+t²) / (b₁/2 + (b₂/2)t² + βt)`
pub fn f_ratio(params: &CouplingParams, a_star: f64, t: f64) -> f64 {
    0.5 * a_star * (1.0 + t * t) / (0.5 * params.b1 + 0.5 * params.b2 * t * t + params.beta * t)
}

/// `f'(t)`, written through the sign-carrying factor `βt² + (b₁−b₂)t − β`.
fn f_ratio_slope(params: &CouplingParams, a_star: f64, t: f64) -> f64 {
    let d = 0.5 * params.b1 + 0.5 * params.b2 * t * t + params.beta * t;
    a_star * (params.beta * t * t + (params.b1 - params.b2) * t - params.beta) / (d * d)
}

/// Infimum of [`f_ratio`] over `t ∈ (0, ∞)`. Returns `(t_min, value)`;
/// `t_min` is `0` or `∞` when a boundary limit wins.
pub fn f_inf(params: &CouplingParams, a_star: f64) -> (f64, f64) {
    // scan in log t, then polish with Brent and a root of f'
    let g = |s: f64| f_ratio(params, a_star, s.exp());
    let (lo, hi, n) = (-30.0, 30.0, 241);
    let step = (hi - lo) / (n - 1) as f64;
    let mut best = 0usize;
    let mut best_v = f64::INFINITY;
    for k in 0..n {
        let v = g(lo + k as f64 * step);
        if v < best_v {
            best_v = v;
            best = k;
        }
    }
    let a = lo + best.saturating_sub(1) as f64 * step;
    let b = lo + (best + 1).min(n - 1) as f64 * step;
    let (s, _) = brent_min(g, a, b, 1e-12, 200);
    let mut t = s.exp();
    let slope = |t: f64| f_ratio_slope(params, a_star, t);
    let (ta, tb) = (a.exp(), b.exp());
    if slope(ta) < 0.0 && slope(tb) > 0.0 {
        if let Some(r) = brent_root(slope, ta, tb, 1e-15 * t.max(1.0), 200) {
            t = r;
        }
    }
    let interior = f_ratio(params, a_star, t);
    let left = a_star / params.b1;
    let right = a_star / params.b2;
    if interior <= left && interior <= right {
        (t, interior)
    } else if left <= right {
        (0.0, left)
    } else {
        (f64::INFINITY, right)
    }
}

/// `l(t) = (t² + t) / ((b₂/2)t² + βt + b₁/2)`
pub fn l_func(params: &CouplingParams, t: f64) -> f64 {
    (t * t + t) / (0.5 * params.b2 * t * t + params.beta * t + 0.5 * params.b1)
}

/// `a*/max(aᵢ) ≤ 𝒪 ≤ 2a*/(a₁+a₂)`
pub fn quotient_bounds(params: &CouplingParams, a_star: f64) -> QuotientBounds {
    QuotientBounds {
        lower: a_star / params.a1().max(params.a2()),
        upper: 2.0 * a_star / (params.b1 + params.b2 + 2.0 * params.beta),
    }
}

/// `(|1/𝒪̂(p) − 1/𝒪̂(q)|, (3/a*)|p − q|)` for caller-supplied estimates.
pub fn lipschitz_gap(p: &CouplingParams, q: &CouplingParams, a_star: f64, o_p: f64, o_q: f64) -> (f64, f64) {
    ((1.0 / o_p - 1.0 / o_q).abs(), 3.0 / a_star * p.distance(q))
}

/// Default width of the boundary band, relative to `a*`.
pub const DEFAULT_REL_TOL: f64 = 1e-12;

pub fn classify(params: &CouplingParams, a_star: f64) -> RegionLabel {
    classify_with_tol(params, a_star, DEFAULT_REL_TOL * a_star)
}

/// Region of the triple. Comparisons against region boundaries use a band
/// of half-width `tol`: values within the band count as on the boundary.
pub fn classify_with_tol(params: &CouplingParams, a_star: f64, tol: f64) -> RegionLabel {
    let CouplingParams { b1, b2, beta } = *params;
    let label = |tag: RegionTag, what: String| RegionLabel {
        tag,
        detail: format!("{what} (boundary band {tol:e})"),
    };
    let upper = (2.0 * a_star - b1 - b2) / 2.0;

    if b1 > a_star + tol || b2 > a_star + tol {
        return label(RegionTag::NoMinimizer, "some b_i exceeds a*".into());
    }
    if beta > upper + tol {
        return label(
            RegionTag::NoMinimizer,
            format!("beta exceeds (2a* - b1 - b2)/2 = {upper:e}"),
        );
    }
    if (b1 - a_star).abs() <= tol || (b2 - a_star).abs() <= tol {
        return label(RegionTag::Indeterminate, "some b_i equals a*; not settled".into());
    }
    let lower = ((a_star - b1) * (a_star - b2)).sqrt();
    if beta < lower - tol {
        return label(
            RegionTag::Existence,
            format!("beta below sqrt((a* - b1)(a* - b2)) = {lower:e}"),
        );
    }
    if (b1 - b2).abs() <= tol {
        if (beta - (a_star - b1)).abs() <= tol {
            return label(
                RegionTag::SegmentEqualB,
                "b1 = b2 = a* - beta; a minimizer exists iff the coupled ground energy of \
                 the trap problem lies below inf(V1 + V2)"
                    .into(),
            );
        }
        return label(RegionTag::Indeterminate, "equal b off the critical segment".into());
    }
    if (b1 - b2).abs() <= 2.0 * lower + tol && beta <= upper + tol {
        return label(
            RegionTag::BorderlineUnequal,
            format!(
                "beta in [{lower:e}, {upper:e}] with |b1 - b2| <= 2 sqrt((a* - b1)(a* - b2)); \
                 existence is only known for beta close to the lower endpoint"
            ),
        );
    }
    label(RegionTag::Indeterminate, "not covered by the known criteria".into())
}

#[cfg(test)]
mod tests {
    use super::*;

    const A: f64 = 11.700896524552151;

    fn p(b1: f64, b2: f64, beta: f64) -> CouplingParams {
        CouplingParams::new(b1, b2, beta).unwrap()
    }

    /// stationary point of f from the quadratic `βt² + (b₁−b₂)t − β = 0`
    fn stationary_t(c: &CouplingParams) -> f64 {
        ((c.b2 - c.b1) + ((c.b1 - c.b2).powi(2) + 4.0 * c.beta * c.beta).sqrt()) / (2.0 * c.beta)
    }

    #[test]
    fn rejects_nonpositive() {
        assert!(CouplingParams::new(0.0, 1.0, 1.0).is_err());
        assert!(CouplingParams::new(1.0, -1.0, 1.0).is_err());
        assert!(CouplingParams::new(1.0, 1.0, f64::NAN).is_err());
    }

    #[test]
    fn f_ratio_examples() {
        let c = p(3.0, 3.0, 2.0);
        assert!((f_ratio(&c, A, 1.0) - A / 5.0).abs() < 1e-14);
        let (b1, b2) = (0.3 * A, 0.6 * A);
        let beta = ((A - b1) * (A - b2)).sqrt();
        let t1 = ((A - b1) / (A - b2)).sqrt();
        assert!((f_ratio(&p(b1, b2, beta), A, t1) - 1.0).abs() < 1e-14);
        let c = p(2.0, 5.0, 1.0);
        assert!((f_ratio(&c, A, 1e-9) - A / 2.0).abs() < 1e-7);
        assert!((f_ratio(&c, A, 1e9) - A / 5.0).abs() < 1e-7);
    }

    #[test]
    fn f_inf_matches_stationary_point() {
        for c in [p(2.0, 5.0, 1.0), p(0.4 * A, 0.6 * A, 0.49 * A), p(1.0, 1.0, 3.0), p(7.0, 0.5, 0.01)] {
            let (t, v) = f_inf(&c, A);
            let ts = stationary_t(&c);
            assert!((t - ts).abs() < 1e-8 * ts.max(1.0), "{c:?}: {t} vs {ts}");
            assert!((v - f_ratio(&c, A, ts)).abs() < 1e-13 * v);
            assert!(f_ratio_slope(&c, A, t).abs() < 1e-10);
        }
    }

    #[test]
    fn equal_b_minimum_at_one() {
        let b = A - 0.3 * A;
        let (t, v) = f_inf(&p(b, b, 0.3 * A), A);
        assert!((t - 1.0).abs() < 1e-10);
        assert!((v - 1.0).abs() < 1e-14);
        assert!(f_ratio_slope(&p(2.0, 2.0, 0.7), A, 1.0).abs() < 1e-15);
    }

    #[test]
    fn l_func_examples() {
        let c = p(2.0, 5.0, 1.5);
        assert_eq!(l_func(&c, 0.0), 0.0);
        assert!((l_func(&c, 1.0) - 2.0 / (1.0 + 2.5 + 1.5)).abs() < 1e-15);
        assert!((l_func(&c, 1e9) - 2.0 / 5.0).abs() < 1e-8);
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify(&p(0.5 * A, 0.5 * A, 0.4 * A), A).tag, RegionTag::Existence);
        assert_eq!(classify(&p(0.3 * A, 0.5 * A, 0.62 * A), A).tag, RegionTag::NoMinimizer);
        assert_eq!(classify(&p(0.4 * A, 0.6 * A, 0.49 * A), A).tag, RegionTag::BorderlineUnequal);
        assert_eq!(classify(&p(0.7 * A, 0.7 * A, 0.3 * A), A).tag, RegionTag::SegmentEqualB);
        assert_eq!(classify(&p(A, 0.5 * A, 0.01 * A), A).tag, RegionTag::Indeterminate);
        assert_eq!(classify(&p(1.1 * A, 0.5 * A, 0.01 * A), A).tag, RegionTag::NoMinimizer);
        let label = classify(&p(0.5 * A, 0.5 * A, 0.4 * A), A);
        assert!(label.detail.contains("band"));
    }

    #[test]
    fn quotient_bounds_examples() {
        let q = quotient_bounds(&p(A / 3.0, A / 3.0, A / 3.0), A);
        assert!((q.lower - 1.5).abs() < 1e-14 && (q.upper - 1.5).abs() < 1e-14);
        let beta = 0.25 * A;
        let q = quotient_bounds(&p(A - beta, A - beta, beta), A);
        assert!((q.lower - 1.0).abs() < 1e-15 && (q.upper - 1.0).abs() < 1e-15);
        let q = quotient_bounds(&p(2.0, 3.0, 1.0), A);
        assert!(q.lower < q.upper);
    }

    #[test]
    fn lipschitz_identical_points() {
        let c = p(2.0, 3.0, 1.0);
        assert_eq!(lipschitz_gap(&c, &c, A, 1.3, 1.3), (0.0, 0.0));
    }
}
