//! Static SVG output: log-log fits and a radial profile overlay.

use std::fmt::Write;

use crate::blowup::{BlowupError, FitResult};
use crate::fields::{Field2D, PotentialAnalysis};
use crate::townes::{lambda_star, RadialProfile, TownesConstants};

const W: f64 = 640.0;
const H: f64 = 420.0;
const MARGIN: f64 = 60.0;

struct Frame {
    x: [f64; 2],
    y: [f64; 2],
}

impl Frame {
    fn fit(xs: &[f64], ys: &[f64]) -> Self {
        let span = |v: &[f64]| {
            let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            if hi > lo {
                let pad = 0.05 * (hi - lo);
                [lo - pad, hi + pad]
            } else {
                [lo - 0.5, lo + 0.5]
            }
        };
        Frame { x: span(xs), y: span(ys) }
    }

    fn px(&self, x: f64) -> f64 {
        MARGIN + (x - self.x[0]) / (self.x[1] - self.x[0]) * (W - 2.0 * MARGIN)
    }

    fn py(&self, y: f64) -> f64 {
        H - MARGIN - (y - self.y[0]) / (self.y[1] - self.y[0]) * (H - 2.0 * MARGIN)
    }
}

fn open(s: &mut String, f: &Frame, xlabel: &str, ylabel: &str) {
    let _ = write!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" font-family="sans-serif" font-size="12">
<rect width="100%" height="100%" fill="white"/>
<rect x="{MARGIN}" y="{MARGIN}" width="{}" height="{}" fill="none" stroke="black"/>
<text x="{}" y="{}" text-anchor="middle">{xlabel}</text>
<text x="15" y="{}" transform="rotate(-90 15 {})" text-anchor="middle">{ylabel}</text>
"#,
        W - 2.0 * MARGIN,
        H - 2.0 * MARGIN,
        W / 2.0,
        H - 15.0,
        H / 2.0,
        H / 2.0,
    );
    for (v, anchor) in [(f.x[0], "start"), (f.x[1], "end")] {
        let _ = writeln!(s, r#"<text x="{:.1}" y="{}" text-anchor="{anchor}">{v:.3}</text>"#, f.px(v), H - MARGIN + 16.0);
    }
    for v in f.y {
        let _ = writeln!(s, r#"<text x="{}" y="{:.1}" text-anchor="end">{v:.3}</text>"#, MARGIN - 4.0, f.py(v) + 4.0);
    }
}

fn polyline(s: &mut String, f: &Frame, xs: &[f64], ys: &[f64], stroke: &str, dash: bool) {
    let pts: Vec<String> = xs
        .iter()
        .zip(ys)
        .map(|(&x, &y)| format!("{:.2},{:.2}", f.px(x), f.py(y)))
        .collect();
    let dash = if dash { r#" stroke-dasharray="6 4""# } else { "" };
    let _ = writeln!(s, r#"<polyline points="{}" fill="none" stroke="{stroke}"{dash}/>"#, pts.join(" "));
}

/// Data points and the fitted line in `log₁₀` axes.
pub fn loglog_fit(x: &[f64], y: &[f64], fit: &FitResult, xlabel: &str, ylabel: &str) -> String {
    let lx: Vec<f64> = x.iter().map(|v| v.log10()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.log10()).collect();
    let ends = [fit.window[0].log10(), fit.window[1].log10()];
    let line: Vec<f64> = ends
        .iter()
        .map(|&l| fit.constant.log10() + fit.exponent * l)
        .collect();
    let f = Frame::fit(&[lx.as_slice(), &ends].concat(), &[ly.as_slice(), &line].concat());
    let mut s = String::new();
    open(&mut s, &f, &format!("log10 {xlabel}"), &format!("log10 {ylabel}"));
    polyline(&mut s, &f, &ends, &line, "steelblue", false);
    for (&a, &b) in lx.iter().zip(&ly) {
        let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="3.5" fill="firebrick"/>"#, f.px(a), f.py(b));
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}">slope {:.5} ± {:.1e}</text>"#,
        MARGIN + 8.0,
        MARGIN + 16.0,
        fit.exponent,
        fit.stderr
    );
    s.push_str("</svg>\n");
    s
}

/// Cut of `u` along x through its maximum, against the predicted profile.
pub fn profile_overlay(
    u: &Field2D,
    eps_raw: f64,
    profile: &RadialProfile,
    constants: &TownesConstants,
    analysis: &PotentialAnalysis,
) -> Result<String, BlowupError> {
    let eps = eps_raw.powf(1.0 / (analysis.p0 + 2.0));
    let core = eps / lambda_star(analysis.p0, analysis.gamma, constants)?;
    let amp = 1.0 / (core * constants.a_star.sqrt());
    let c = u.max_location();
    let g = u.grid;
    let row = (0..g.n)
        .min_by(|&a, &b| (g.coord(a) - c[1]).abs().total_cmp(&(g.coord(b) - c[1]).abs()))
        .unwrap_or(0);
    let reach = 8.0 * core;
    let cols: Vec<usize> = (0..g.n).filter(|&j| (g.coord(j) - c[0]).abs() <= reach).collect();
    let xs: Vec<f64> = cols.iter().map(|&j| g.coord(j)).collect();
    let got: Vec<f64> = cols.iter().map(|&j| u.values[[row, j]]).collect();
    let want: Vec<f64> = xs.iter().map(|&x| amp * profile.eval((x - c[0]).abs() / core)).collect();
    let f = Frame::fit(&xs, &[got.as_slice(), &want].concat());
    let mut s = String::new();
    open(&mut s, &f, "x", "u");
    polyline(&mut s, &f, &xs, &want, "steelblue", true);
    polyline(&mut s, &f, &xs, &got, "firebrick", false);
    s.push_str("</svg>\n");
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fit_plot_is_closed_svg() {
        let fit = FitResult {
            exponent: 0.5,
            constant: 2.0,
            stderr: 1e-4,
            window: [1e-3, 1e-1],
        };
        let s = loglog_fit(&[1e-3, 1e-2, 1e-1], &[0.06, 0.2, 0.63], &fit, "eps", "E");
        assert!(s.starts_with("<svg") && s.trim_end().ends_with("</svg>"));
        assert_eq!(s.matches("<circle").count(), 3);
    }
}
