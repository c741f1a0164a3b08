use gpduo::criteria::{classify, f_inf, f_ratio, l_func, quotient_bounds, CouplingParams, RegionTag};
use proptest::prelude::*;

const A: f64 = 11.700896524552151;

fn triple(max: f64) -> impl Strategy<Value = CouplingParams> {
    (1e-3..max, 1e-3..max, 1e-3..max).prop_map(|(b1, b2, beta)| CouplingParams::new(b1 * A, b2 * A, beta * A).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn classify_agrees_with_the_closed_regions(p in triple(1.5)) {
        let tag = classify(&p, A).tag;
        let lower = ((A - p.b1) * (A - p.b2)).max(0.0).sqrt();
        let band = 1e-9 * A;
        if p.b1 > A + band || p.b2 > A + band || p.beta > (2.0 * A - p.b1 - p.b2) / 2.0 + band {
            prop_assert_eq!(tag, RegionTag::NoMinimizer);
        } else if p.b1 < A - band && p.b2 < A - band && p.beta < lower - band {
            prop_assert_eq!(tag, RegionTag::Existence);
        } else {
            prop_assert_ne!(tag, RegionTag::Existence);
        }
    }

    #[test]
    fn f_inf_is_a_lower_bound(p in triple(1.0), s in -6.0f64..6.0) {
        let (_, v) = f_inf(&p, A);
        let t = s.exp();
        prop_assert!(v <= f_ratio(&p, A, t) * (1.0 + 1e-12));
    }

    #[test]
    fn existence_region_has_f_inf_above_one(
        b1 in 0.01f64..0.99, b2 in 0.01f64..0.99, share in 0.001f64..0.999
    ) {
        let (b1, b2) = (b1 * A, b2 * A);
        let beta = share * ((A - b1) * (A - b2)).sqrt();
        let p = CouplingParams::new(b1, b2, beta).unwrap();
        prop_assert!(f_inf(&p, A).1 > 1.0 + 1e-9);
    }

    #[test]
    fn boundary_touches_one(b1 in 0.01f64..0.99, b2 in 0.01f64..0.99) {
        let (b1, b2) = (b1 * A, b2 * A);
        let p = CouplingParams::new(b1, b2, ((A - b1) * (A - b2)).sqrt()).unwrap();
        let t1 = ((A - b1) / (A - b2)).sqrt();
        prop_assert!((f_ratio(&p, A, t1) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn l_exceeds_its_value_at_one(
        x in 0.001f64..0.999, y in 0.001f64..0.999, extra in 0.0f64..1.0
    ) {
        prop_assume!(x != y);
        let (b1, b2) = (x.min(y) * A, x.max(y) * A);
        let beta = 0.5 * (b2 - b1) + extra * A;
        let p = CouplingParams::new(b1, b2, beta).unwrap();
        let l1 = l_func(&p, 1.0);
        for k in 1..=50 {
            let t = 100f64.powf(k as f64 / 50.0);
            prop_assert!(l_func(&p, t) > l1, "t = {}", t);
        }
    }

    #[test]
    fn quotient_bounds_are_ordered(p in triple(1.0)) {
        let b = quotient_bounds(&p, A);
        prop_assert!(b.lower <= b.upper * (1.0 + 1e-15));
        prop_assert!(b.lower > 0.0);
    }
}
