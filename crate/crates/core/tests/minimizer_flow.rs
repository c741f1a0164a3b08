use gpduo::blowup::fit_loglog;
use gpduo::criteria::CouplingParams;
use gpduo::fields::{Grid2D, PotentialSpec, Potentials, Well};
use gpduo::minimizer::{estimate_gn_quotient, minimize, minimize_single, FlowConfig};

const A: f64 = 11.700896524552151;

#[test]
fn symmetric_problem_keeps_components_equal() {
    let g = Grid2D::new(64, 8.0).unwrap();
    let p = CouplingParams::new(0.3 * A, 0.3 * A, 0.2 * A).unwrap();
    let r = minimize(&p, &PotentialSpec::harmonic(), &g, &FlowConfig::default()).unwrap();
    let gap = r.u1.l2_distance(&r.u2);
    assert!(gap < 1e-12, "{gap:e}");
    assert!((r.mu1 - r.mu2).abs() < 1e-12);
    assert!(r.energy >= 0.0);
    assert!(r.diff2 <= 2.0 / p.beta * r.energy);
}

#[test]
fn vanishing_coupling_splits_into_single_problems() {
    let g = Grid2D::new(64, 8.0).unwrap();
    let mut pot = PotentialSpec::harmonic();
    pot.components[1].wells = vec![Well {
        center: [0.5, 0.0],
        exponent: 4.0,
    }];
    let cfg = FlowConfig::default().with_tol(1e-9);
    let (b1, b2) = (0.2 * A, 0.4 * A);
    let joint = minimize(&CouplingParams::new(b1, b2, 1e-300).unwrap(), &pot, &g, &cfg).unwrap();
    let v = Potentials::from_spec(&pot, &g);
    let one = minimize_single(b1, &v.v1, &g, &cfg).unwrap();
    let two = minimize_single(b2, &v.v2, &g, &cfg).unwrap();
    assert!((joint.energy - one.energy - two.energy).abs() < 1e-8);
    assert!(joint.u1.l2_distance(&one.u) < 1e-6);
    assert!(joint.u2.l2_distance(&two.u) < 1e-6);
    assert!((joint.mu1 - one.mu).abs() < 1e-7 && (joint.mu2 - two.mu).abs() < 1e-7);
}

#[test]
fn equal_thirds_quotient() {
    // both bounds of the sandwich equal 3/2 here
    let g = Grid2D::new(128, 16.0).unwrap();
    let p = CouplingParams::new(A / 3.0, A / 3.0, A / 3.0).unwrap();
    let o = estimate_gn_quotient(&p, &g, &FlowConfig::default().with_tol(1e-7)).unwrap();
    assert!((o - 1.5).abs() < 1e-3, "{o}");
}

#[test]
fn single_component_energy_exponent() {
    // e(a) ~ (a* − a)^{1/2} for the harmonic trap
    let g = Grid2D::new(256, 8.0).unwrap();
    let v = Potentials::from_spec(&PotentialSpec::harmonic(), &g).v1;
    let deltas = [1.0, 0.5, 0.2, 0.1, 0.05, 0.03];
    let energies: Vec<f64> = deltas
        .iter()
        .map(|d| minimize_single(A - d, &v, &g, &FlowConfig::default()).unwrap().energy)
        .collect();
    let fit = fit_loglog(&deltas, &energies).unwrap();
    assert!((fit.exponent - 0.5).abs() < 0.05, "{fit:?}");
}
