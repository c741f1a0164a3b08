//! Log-log least squares on sweep records.

use serde::{Deserialize, Serialize};

use super::{BlowupError, SweepRecord};

pub const MIN_RECORDS: usize = 4;
/// Smallest accepted `log₁₀(max eps_raw / min eps_raw)`.
pub const MIN_DECADES: f64 = 1.5;

/// `y ≈ constant · x^exponent`; `stderr` is the standard error of the slope.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub exponent: f64,
    pub constant: f64,
    pub stderr: f64,
    /// `[min x, max x]`
    pub window: [f64; 2],
}

pub fn fit_loglog(x: &[f64], y: &[f64]) -> Result<FitResult, BlowupError> {
    if x.len() != y.len() {
        return Err(BlowupError::Records(format!("{} abscissae for {} values", x.len(), y.len())));
    }
    if let Some(k) = x.iter().zip(y).position(|(&a, &b)| !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite())) {
        return Err(BlowupError::Records(format!(
            "log fit needs positive finite data (row {k}: {}, {})",
            x[k], y[k]
        )));
    }
    let lo = x.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let decades = if x.is_empty() { 0.0 } else { (hi / lo).log10() };
    if x.len() < MIN_RECORDS || decades < MIN_DECADES {
        return Err(BlowupError::InsufficientSpan {
            records: x.len(),
            decades,
        });
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let icept = my - slope * mx;
    let rss: f64 = lx.iter().zip(&ly).map(|(a, b)| (b - icept - slope * a).powi(2)).sum();
    let stderr = (rss / (n - 2.0) / sxx).sqrt();
    Ok(FitResult {
        exponent: slope,
        constant: icept.exp(),
        stderr,
        window: [lo, hi],
    })
}

/// `p₀/(p₀+2)`
pub fn energy_exponent_target(p0: f64) -> f64 {
    p0 / (p0 + 2.0)
}

/// `−2/(p₀+2)`
pub fn l4_exponent_target(p0: f64) -> f64 {
    -2.0 / (p0 + 2.0)
}

/// Energy against `eps_raw`.
pub fn fit_energy_exponent(records: &[SweepRecord]) -> Result<FitResult, BlowupError> {
    let x: Vec<f64> = records.iter().map(|r| r.eps_raw).collect();
    let y: Vec<f64> = records.iter().map(|r| r.energy).collect();
    fit_loglog(&x, &y)
}

/// `∫uᵢ⁴` of component `i ∈ {0, 1}` against `eps_raw`.
pub fn fit_l4_exponent(records: &[SweepRecord], component: usize) -> Result<FitResult, BlowupError> {
    let x: Vec<f64> = records.iter().map(|r| r.eps_raw).collect();
    let y: Vec<f64> = records
        .iter()
        .map(|r| if component == 0 { r.l4_1 } else { r.l4_2 })
        .collect();
    fit_loglog(&x, &y)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law_is_recovered() {
        let x: Vec<f64> = (0..6).map(|k| 10f64.powf(-0.5 * k as f64)).collect();
        let y: Vec<f64> = x.iter().map(|v| 3.0 * v.powf(0.4)).collect();
        let f = fit_loglog(&x, &y).unwrap();
        assert!((f.exponent - 0.4).abs() < 1e-12);
        assert!((f.constant - 3.0).abs() < 1e-11);
        assert!(f.stderr < 1e-12);
    }

    #[test]
    fn short_windows_are_refused() {
        let x = [1e-1, 5e-2, 2e-2, 1e-2];
        let y = [1.0, 2.0, 3.0, 4.0];
        assert!(matches!(fit_loglog(&x, &y), Err(BlowupError::InsufficientSpan { .. })));
        assert!(matches!(
            fit_loglog(&x[..3], &y[..3]),
            Err(BlowupError::InsufficientSpan { records: 3, .. })
        ));
        assert!(fit_loglog(&[1.0, 0.1, 0.01, 0.001], &[1.0, -1.0, 1.0, 1.0]).is_err());
    }

    #[test]
    fn targets() {
        assert_eq!(energy_exponent_target(2.0), 0.5);
        assert_eq!(l4_exponent_target(2.0), -0.5);
        assert!((energy_exponent_target(4.0) - 2.0 / 3.0).abs() < 1e-15);
    }
}
