//! Townes solver against an independent fixed-step RK4 shooting and
//! against reference constants computed outside this crate.

use gpduo::townes::*;

// From an independent scipy solve (solve_bvp + quad at tight tolerance).
const REF_Q0: f64 = 2.206200864650944;
const REF_A_STAR: f64 = 11.700896524552151;
const REF_M1: f64 = 10.68560202226485;
const REF_M2: f64 = 13.894861636422528;
const REF_M3: f64 = 23.727743860860706;
const REF_M4: f64 = 50.77898229441335;
const REF_M6: f64 = 403.86059224469295;

/// Does the RK4 trajectory from amplitude `a` cross zero?
fn rk4_overshoots(a: f64, h: f64) -> bool {
    let rhs = |r: f64, q: f64, p: f64| (p, -p / r + q - q * q * q);
    let c = a - a * a * a;
    let mut r = h;
    let mut q = a + h * h * c / 4.0;
    let mut p = h * c / 2.0;
    while r < 40.0 {
        let (k1q, k1p) = rhs(r, q, p);
        let (k2q, k2p) = rhs(r + h / 2.0, q + h / 2.0 * k1q, p + h / 2.0 * k1p);
        let (k3q, k3p) = rhs(r + h / 2.0, q + h / 2.0 * k2q, p + h / 2.0 * k2p);
        let (k4q, k4p) = rhs(r + h, q + h * k3q, p + h * k3p);
        q += h / 6.0 * (k1q + 2.0 * k2q + 2.0 * k3q + k4q);
        p += h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
        r += h;
        if q < 0.0 {
            return true;
        }
        if p > 0.0 {
            return false;
        }
    }
    false
}

fn rk4_amplitude(h: f64) -> f64 {
    let (mut lo, mut hi) = (1.0, 4.0);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if rk4_overshoots(mid, h) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn amplitude_matches_richardson_extrapolated_rk4() {
    let (q1, q2) = (rk4_amplitude(0.01), rk4_amplitude(0.005));
    let oracle = (16.0 * q2 - q1) / 15.0;
    assert!((oracle - REF_Q0).abs() < 1e-8, "oracle {oracle}");
    let p = solve_townes(20.0, 4096, 1e-10).unwrap();
    assert!((p.q0() - oracle).abs() < 1e-8, "{} vs {oracle}", p.q0());
    assert!((p.q0() - REF_Q0).abs() < 1e-12);
}

#[test]
fn constants_match_reference() {
    let p = solve_townes(20.0, 4096, 1e-10).unwrap();
    let c = compute_constants(&p, &DEFAULT_MOMENTS).unwrap();
    let rel = |x: f64, y: f64| (x / y - 1.0).abs();
    assert!(rel(c.a_star, REF_A_STAR) < 1e-10);
    assert_eq!(c.moment(0.0), Some(c.a_star));
    for (k, r) in [(1.0, REF_M1), (2.0, REF_M2), (3.0, REF_M3), (4.0, REF_M4), (6.0, REF_M6)] {
        assert!(rel(c.moment(k).unwrap(), r) < 1e-9, "moment {k}");
    }
    assert!(rel(c.kinetic, c.a_star) < 1e-6);
    assert!(rel(c.l4, 2.0 * c.a_star) < 1e-6);
    let lam = lambda_star(2.0, 2.0, &c).unwrap();
    assert!(rel(lam, REF_M2.powf(0.25)) < 1e-10);
    let lc = limit_constant(2.0, 2.0, &c).unwrap();
    assert!(rel(lc, 4.0 * REF_M2.sqrt() / REF_A_STAR) < 1e-10);
}

#[test]
fn profile_contract() {
    let p = solve_townes(20.0, 4096, 1e-10).unwrap();
    assert!(p.values().windows(2).all(|w| w[1] < w[0]));
    assert!(p.values().iter().all(|&q| q > 0.0));
    assert!(*p.values().last().unwrap() < 1e-8);
    assert!(p.ode_residual() <= 1e-9, "residual {:e}", p.ode_residual());
    let h = p.grid().spacing();
    // even profile: the forward difference at 0 is Q''(0)h/2 = (Q0³ − Q0)h/4
    let q0 = p.q0();
    let forward = (p.values()[1] - p.values()[0]) / h;
    assert!((forward + (q0 * q0 * q0 - q0) * h / 4.0).abs() < h * h);
    let slope = decay_slope(&p).unwrap();
    assert!(decay_within_contract(slope), "slope {slope}");
}

#[test]
fn grid_doubling_stability() {
    let a = |n| compute_constants(&solve_townes(20.0, n, 1e-10).unwrap(), &[0.0]).unwrap().a_star;
    let (a1, a2) = (a(4096), a(8192));
    assert!((a1 / a2 - 1.0).abs() < 1e-8);
}

#[test]
fn samples_roundtrip_reproduces_constants() {
    let p = solve_townes(20.0, 4096, 1e-10).unwrap();
    let q = RadialProfile::from_samples(&p.samples()).unwrap();
    assert_eq!(q.values(), p.values());
    let (c1, c2) = (
        compute_constants(&p, &DEFAULT_MOMENTS).unwrap(),
        compute_constants(&q, &DEFAULT_MOMENTS).unwrap(),
    );
    assert!((c1.a_star / c2.a_star - 1.0).abs() < 1e-12);
    assert!((c1.kinetic / c2.kinetic - 1.0).abs() < 1e-9);
    for r in [0.0, 0.37, 3.3, 12.9, 25.0] {
        assert!((p.eval(r) - q.eval(r)).abs() < 1e-10 * p.eval(r).max(1e-3));
    }
}

#[test]
fn interpolation_tracks_nodes_and_tail() {
    let p = solve_townes(20.0, 4096, 1e-10).unwrap();
    let nodes = p.grid().nodes();
    for i in [0, 17, 1000, 4095] {
        assert_eq!(p.eval(nodes[i]), p.values()[i]);
        assert_eq!(p.eval(-nodes[i]), p.values()[i]);
    }
    let fine = solve_townes(20.0, 8193, 1e-10).unwrap();
    // midpoints of the coarse grid are nodes of the fine one
    for i in [3, 501, 2222] {
        let r = 0.5 * (nodes[i] + nodes[i + 1]);
        assert!((p.eval(r) - fine.eval(r)).abs() < 1e-10, "r = {r}");
    }
    assert!(p.eval(30.0) > 0.0 && p.eval(30.0) < p.eval(20.0));
}

#[test]
fn tail_beyond_short_grid_is_flagged() {
    let p = solve_townes(20.0, 2048, 1e-10).unwrap();
    assert!(matches!(moment_of(&p, 40.0), Err(TownesError::QuadratureDivergence { .. })));
}

#[test]
fn artifact_json_roundtrip() {
    let art = townes_artifact(20.0, 2048, 1e-10).unwrap();
    assert!(art.moments.contains_key("2") && art.moments.contains_key("6"));
    let text = serde_json::to_string(&art).unwrap();
    let back: TownesArtifact = serde_json::from_str(&text).unwrap();
    assert_eq!(back.a_star.to_bits(), art.a_star.to_bits());
    assert_eq!(back.profile, art.profile);
    let (_, c) = back.into_parts().unwrap();
    assert_eq!(c.moment(2.0), art.moments.get("2").copied());
    assert!(serde_json::from_str::<TownesArtifact>(&text.replacen("{", "{\"extra\":1,", 1)).is_err());
}
