//! Adaptive Dormand–Prince 5(4) stepper for small autonomous-in-form systems.

/// Right-hand side `f(r, y, dy)`.
pub trait Rhs<const N: usize> {
    fn eval(&self, r: f64, y: &[f64; N], dy: &mut [f64; N]);
}

impl<const N: usize, F> Rhs<N> for F
where
    F: Fn(f64, &[f64; N], &mut [f64; N]),
{
    fn eval(&self, r: f64, y: &[f64; N], dy: &mut [f64; N]) {
        self(r, y, dy)
    }
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;

// fifth-order weights (also the last stage row, FSAL)
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;

// embedded fourth-order weights
const E1: f64 = 5179.0 / 57600.0;
const E3: f64 = 7571.0 / 16695.0;
const E4: f64 = 393.0 / 640.0;
const E5: f64 = -92097.0 / 339200.0;
const E6: f64 = 187.0 / 2100.0;
const E7: f64 = 1.0 / 40.0;

/// Adaptive integrator state. Tolerances are mixed: `atol + rtol * |y|`.
#[derive(Debug, Clone)]
pub struct Dopri5 {
    pub rtol: f64,
    pub atol: f64,
    pub h_min: f64,
    pub max_steps: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepOutcome {
    Reached,
    Stopped,
    StepUnderflow,
    TooManySteps,
}

impl Dopri5 {
    pub fn new(rtol: f64, atol: f64) -> Self {
        Self {
            rtol,
            atol,
            h_min: 1e-14,
            max_steps: 1_000_000,
        }
    }

    fn trial<const N: usize, F: Rhs<N>>(
        f: &F,
        r: f64,
        y: &[f64; N],
        k1: &[f64; N],
        h: f64,
    ) -> ([f64; N], [f64; N], [f64; N]) {
        let mut k2 = [0.0; N];
        let mut k3 = [0.0; N];
        let mut k4 = [0.0; N];
        let mut k5 = [0.0; N];
        let mut k6 = [0.0; N];
        let mut k7 = [0.0; N];
        let mut tmp = [0.0; N];

        for i in 0..N {
            tmp[i] = y[i] + h * A21 * k1[i];
        }
        f.eval(r + C2 * h, &tmp, &mut k2);
        for i in 0..N {
            tmp[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i]);
        }
        f.eval(r + C3 * h, &tmp, &mut k3);
        for i in 0..N {
            tmp[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
        }
        f.eval(r + C4 * h, &tmp, &mut k4);
        for i in 0..N {
            tmp[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
        }
        f.eval(r + C5 * h, &tmp, &mut k5);
        for i in 0..N {
            tmp[i] = y[i]
                + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
        }
        f.eval(r + h, &tmp, &mut k6);
        let mut y5 = [0.0; N];
        for i in 0..N {
            y5[i] = y[i] + h * (B1 * k1[i] + B3 * k3[i] + B4 * k4[i] + B5 * k5[i] + B6 * k6[i]);
        }
        f.eval(r + h, &y5, &mut k7);
        let mut err = [0.0; N];
        for i in 0..N {
            let y4 = y[i]
                + h * (E1 * k1[i]
                    + E3 * k3[i]
                    + E4 * k4[i]
                    + E5 * k5[i]
                    + E6 * k6[i]
                    + E7 * k7[i]);
            err[i] = y5[i] - y4;
        }
        (y5, err, k7)
    }

    /// Integrate from `r0` to `r1`, calling `observe(r, y)` after every
    /// accepted step. `observe` returns `false` to stop early. Every value in
    /// `stops` inside `(r0, r1]` is hit exactly by an accepted step.
    pub fn integrate<const N: usize, F, O>(
        &self,
        f: &F,
        r0: f64,
        y0: [f64; N],
        r1: f64,
        stops: &[f64],
        h_init: f64,
        mut observe: O,
    ) -> (StepOutcome, f64, [f64; N])
    where
        F: Rhs<N>,
        O: FnMut(f64, &[f64; N]) -> bool,
    {
        let mut r = r0;
        let mut y = y0;
        let mut k1 = [0.0; N];
        f.eval(r, &y, &mut k1);
        let mut h = h_init.min(r1 - r0);
        let mut stop_idx = stops.partition_point(|&s| s <= r0);
        let mut steps = 0usize;

        while r < r1 {
            if steps >= self.max_steps {
                return (StepOutcome::TooManySteps, r, y);
            }
            let target = stops.get(stop_idx).copied().unwrap_or(r1).min(r1);
            let mut h_try = h;
            let mut hits_target = false;
            if r + h_try >= target {
                h_try = target - r;
                hits_target = true;
            }
            let (y_new, err, k7) = Self::trial(f, r, &y, &k1, h_try);
            let mut err_norm = 0.0f64;
            for i in 0..N {
                let sc = self.atol + self.rtol * y[i].abs().max(y_new[i].abs());
                err_norm = err_norm.max((err[i] / sc).abs());
            }
            if !err_norm.is_finite() {
                h = h_try * 0.1;
                if h < self.h_min {
                    return (StepOutcome::StepUnderflow, r, y);
                }
                continue;
            }
            if err_norm <= 1.0 {
                r = if hits_target { target } else { r + h_try };
                y = y_new;
                k1 = k7;
                steps += 1;
                if hits_target && stop_idx < stops.len() && stops[stop_idx] <= r {
                    stop_idx += 1;
                }
                if !observe(r, &y) {
                    return (StepOutcome::Stopped, r, y);
                }
                let fac = if err_norm == 0.0 {
                    5.0
                } else {
                    (0.9 * err_norm.powf(-0.2)).clamp(0.2, 5.0)
                };
                // a clipped step says nothing about the natural step size
                h = if hits_target { h.max(h_try * fac) } else { h_try * fac };
            } else {
                h = h_try * (0.9 * err_norm.powf(-0.2)).clamp(0.1, 0.9);
                if h < self.h_min {
                    return (StepOutcome::StepUnderflow, r, y);
                }
            }
        }
        (StepOutcome::Reached, r, y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_growth_to_tolerance() {
        let f = |_r: f64, y: &[f64; 1], dy: &mut [f64; 1]| dy[0] = y[0];
        let (out, r, y) = Dopri5::new(1e-12, 1e-14).integrate(&f, 0.0, [1.0], 1.0, &[], 0.01, |_, _| true);
        assert_eq!(out, StepOutcome::Reached);
        assert_eq!(r, 1.0);
        assert!((y[0] - std::f64::consts::E).abs() < 1e-10);
    }

    #[test]
    fn harmonic_oscillator_hits_stops_exactly() {
        let f = |_r: f64, y: &[f64; 2], dy: &mut [f64; 2]| {
            dy[0] = y[1];
            dy[1] = -y[0];
        };
        let stops: Vec<f64> = (1..=10).map(|k| k as f64 * 0.3).collect();
        let mut seen = Vec::new();
        let (_, _, y) = Dopri5::new(1e-11, 1e-13).integrate(&f, 0.0, [0.0, 1.0], 3.0, &stops, 0.05, |r, y| {
            if stops.iter().any(|&s| s == r) {
                seen.push((r, y[0]));
            }
            true
        });
        assert_eq!(seen.len(), stops.len());
        for (r, v) in seen {
            assert!((v - r.sin()).abs() < 1e-9, "r={r}");
        }
        assert!((y[0] - 3f64.sin()).abs() < 1e-9);
    }

    #[test]
    fn observer_can_stop() {
        let f = |_r: f64, _y: &[f64; 1], dy: &mut [f64; 1]| dy[0] = 1.0;
        let (out, r, _) = Dopri5::new(1e-10, 1e-12).integrate(&f, 0.0, [0.0], 10.0, &[], 0.1, |_, y| y[0] < 2.0);
        assert_eq!(out, StepOutcome::Stopped);
        assert!(r >= 2.0 && r < 10.0);
    }
}
