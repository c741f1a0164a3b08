//! Quadrature on uniformly spaced samples.

/// Gregory's rule: trapezoid plus endpoint difference corrections through
/// fourth differences. Exact for polynomials of degree ≤ 5 and O(h⁶) for
/// smooth integrands. Needs at least 6 samples; falls back to the trapezoid
/// rule below that.
pub fn gregory(values: &[f64], h: f64) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    let trap: f64 = values.iter().sum::<f64>() - 0.5 * (values[0] + values[n - 1]);
    if n < 6 {
        return h * trap;
    }
    let f = values;
    let l = n - 1;
    // forward differences at the left end
    let d1 = f[1] - f[0];
    let d2 = f[2] - 2.0 * f[1] + f[0];
    let d3 = f[3] - 3.0 * f[2] + 3.0 * f[1] - f[0];
    let d4 = f[4] - 4.0 * f[3] + 6.0 * f[2] - 4.0 * f[1] + f[0];
    // backward differences at the right end
    let b1 = f[l] - f[l - 1];
    let b2 = f[l] - 2.0 * f[l - 1] + f[l - 2];
    let b3 = f[l] - 3.0 * f[l - 1] + 3.0 * f[l - 2] - f[l - 3];
    let b4 = f[l] - 4.0 * f[l - 1] + 6.0 * f[l - 2] - 4.0 * f[l - 3] + f[l - 4];

    let corr = -(b1 - d1) / 12.0 - (b2 + d2) / 24.0 - 19.0 * (b3 - d3) / 720.0
        - 3.0 * (b4 + d4) / 160.0;
    h * (trap + corr)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_on_quintics() {
        let n = 11;
        let h = 1.0 / (n - 1) as f64;
        for k in 0..=5 {
            let v: Vec<f64> = (0..n).map(|i| (i as f64 * h).powi(k)).collect();
            let exact = 1.0 / (k as f64 + 1.0);
            assert!((gregory(&v, h) - exact).abs() < 1e-14, "degree {k}");
        }
    }

    #[test]
    fn sixth_order_convergence() {
        let err = |n: usize| {
            let h = std::f64::consts::PI / (n - 1) as f64;
            let v: Vec<f64> = (0..n).map(|i| (i as f64 * h).sin() * (i as f64 * h)).collect();
            (gregory(&v, h) - std::f64::consts::PI).abs()
        };
        let (e1, e2) = (err(41), err(81));
        assert!(e1 / e2 > 40.0, "ratio {}", e1 / e2);
    }
}
