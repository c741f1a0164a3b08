use gpduo::criteria::CouplingParams;
use gpduo::fields::io::{read_fields, write_fields};
use gpduo::fields::{
    analyze_potential, energy, energy_parts, eval_potential, rescale, split_energy, Field2D, Grid2D, PotentialSpec,
    Potentials, Spectral, Well,
};
use proptest::prelude::*;

fn gaussian(g: Grid2D, c: [f64; 2], w: f64) -> Field2D {
    Field2D::from_fn(g, |x, y| (-((x - c[0]).powi(2) + (y - c[1]).powi(2)) / (2.0 * w * w)).exp()).normalized()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn split_identity(
        c1 in (-1.0f64..1.0, -1.0f64..1.0), c2 in (-1.0f64..1.0, -1.0f64..1.0),
        w1 in 0.6f64..1.5, w2 in 0.6f64..1.5,
        b1 in 0.1f64..10.0, b2 in 0.1f64..10.0, beta in 0.1f64..10.0,
    ) {
        let g = Grid2D::new(64, 8.0).unwrap();
        let pot = Potentials::from_spec(&PotentialSpec::harmonic(), &g);
        let mut sp = Spectral::new(&g);
        let u1 = gaussian(g, [c1.0, c1.1], w1);
        let u2 = gaussian(g, [c2.0, c2.1], w2);
        let p = CouplingParams::new(b1, b2, beta).unwrap();
        let e = energy(&u1, &u2, &p, &pot, &mut sp).unwrap();
        let (e1, e2, c) = split_energy(&u1, &u2, &p, &pot, &mut sp);
        prop_assert!((e - (e1 + e2 + c)).abs() < 1e-11 * e.abs().max(1.0));
        prop_assert!(c >= 0.0);
    }

    #[test]
    fn dilation_scales_kinetic_by_lambda_squared(lambda in 0.6f64..1.6, w in 0.9f64..1.3) {
        let g = Grid2D::new(128, 10.0).unwrap();
        let zero = Potentials::zero(&g);
        let mut sp = Spectral::new(&g);
        let u = gaussian(g, [0.0, 0.0], w);
        let v = rescale(&u, lambda).unwrap();
        let k0 = energy_parts(&u, &u, &zero, &mut sp).kinetic[0];
        let k1 = energy_parts(&v, &v, &zero, &mut sp).kinetic[0];
        prop_assert!((k1 / k0 / (lambda * lambda) - 1.0).abs() < 1e-6);
        prop_assert!((v.mass() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn trap_vanishes_only_on_its_centers(
        i in 0usize..64, j in 0usize..64, p in 1.0f64..6.0, q in 1.0f64..6.0,
    ) {
        let g = Grid2D::new(64, 8.0).unwrap();
        let a = [g.coord(i), g.coord(j)];
        let b = [g.coord(63 - i), g.coord((j + 7) % 64)];
        prop_assume!(a != b);
        let spec = PotentialSpec::symmetric(vec![
            Well { center: a, exponent: p },
            Well { center: b, exponent: q },
        ]);
        let (v1, _) = eval_potential(&spec, &g);
        for r in 0..64 {
            for c in 0..64 {
                let x = [g.coord(c), g.coord(r)];
                let on = x == a || x == b;
                prop_assert!(v1[[r, c]] >= 0.0);
                prop_assert_eq!(v1[[r, c]] == 0.0, on);
            }
        }
    }

    #[test]
    fn infinite_flatness_exactly_below_p0(p1 in 1u8..6, q1 in 1u8..6, p2 in 1u8..6, q2 in 1u8..6) {
        let well = |c: [f64; 2], e: u8| Well { center: c, exponent: f64::from(e) };
        let mut spec = PotentialSpec::symmetric(vec![well([1.0, 0.0], p1), well([-1.0, 0.0], q1)]);
        spec.components[1].wells = vec![well([1.0, 0.0], p2), well([-1.0, 0.0], q2)];
        let an = analyze_potential(&spec).unwrap();
        for (pbar, gamma) in an.pbar.iter().zip(&an.gamma_j) {
            prop_assert_eq!(gamma.is_none(), *pbar < an.p0);
        }
        prop_assert_eq!(an.p0, f64::from(p1.min(p2).max(q1.min(q2))));
    }
}

#[test]
fn binary_roundtrip_through_disk() {
    let dir = tempfile::tempdir().unwrap();
    let g = Grid2D::new(64, 8.0).unwrap();
    let u1 = gaussian(g, [0.3, -0.1], 0.9);
    let u2 = Field2D::from_fn(g, |x, y| (x * 1.7 + y).sin() * 1e-300 + x.exp());
    let path = dir.path().join("pair.bin");
    write_fields(&path, &u1, &u2).unwrap();
    let (a, b) = read_fields(&path).unwrap();
    assert_eq!(a, u1);
    assert_eq!(b, u2);
}
