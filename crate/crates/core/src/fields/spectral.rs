//! Fourier multipliers on the periodic grid.
//!
//! Two real fields travel through one complex transform as `u₁ + i·u₂`; any
//! multiplier that is real and even in `k` keeps the two parts separate.

use std::sync::Arc;

use ndarray::Array2;
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::Grid2D;

/// FFT plans and scratch for one grid. Not shared between threads; each
/// solver run owns one.
pub struct Spectral {
    n: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    k2: Vec<f64>,
    /// signed wavenumbers along one axis, Nyquist set to 0
    ks: Vec<f64>,
    /// `max(|k_x|, |k_y|)` per mode, for band limits
    kmax: Vec<f64>,
    buf: Vec<Complex64>,
    tmp: Vec<Complex64>,
    scratch: Vec<Complex64>,
}

impl Spectral {
    pub fn new(grid: &Grid2D) -> Self {
        let n = grid.n;
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(n);
        let inv = planner.plan_fft_inverse(n);
        let scratch_len = fwd.get_inplace_scratch_len().max(inv.get_inplace_scratch_len());
        let ks: Vec<f64> = (0..n).map(|j| grid.wavenumber(j)).collect();
        let mut k2 = Vec::with_capacity(n * n);
        let mut kmax = Vec::with_capacity(n * n);
        for a in 0..n {
            for b in 0..n {
                k2.push(ks[a] * ks[a] + ks[b] * ks[b]);
                kmax.push(ks[a].abs().max(ks[b].abs()));
            }
        }
        let mut ks_odd = ks.clone();
        ks_odd[n / 2] = 0.0;
        Self {
            n,
            fwd,
            inv,
            k2,
            ks: ks_odd,
            kmax,
            buf: vec![Complex64::new(0.0, 0.0); n * n],
            tmp: vec![Complex64::new(0.0, 0.0); n * n],
            scratch: vec![Complex64::new(0.0, 0.0); scratch_len],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn load(&mut self, u1: &Array2<f64>, u2: Option<&Array2<f64>>) {
        let n = self.n;
        assert_eq!(u1.dim(), (n, n));
        match u2 {
            Some(u2) => {
                assert_eq!(u2.dim(), (n, n));
                for ((z, &a), &b) in self.buf.iter_mut().zip(u1.iter()).zip(u2.iter()) {
                    *z = Complex64::new(a, b);
                }
            }
            None => {
                for (z, &a) in self.buf.iter_mut().zip(u1.iter()) {
                    *z = Complex64::new(a, 0.0);
                }
            }
        }
    }

    /// `buf` (rows) → `tmp` (spectrum, transposed layout)
    fn forward(&mut self) {
        self.fwd.process_with_scratch(&mut self.buf, &mut self.scratch);
        transpose(&self.buf, &mut self.tmp, self.n);
        self.fwd.process_with_scratch(&mut self.tmp, &mut self.scratch);
    }

    /// `tmp` (spectrum) → `buf` (rows), scaled
    fn inverse(&mut self) {
        self.inv.process_with_scratch(&mut self.tmp, &mut self.scratch);
        transpose(&self.tmp, &mut self.buf, self.n);
        self.inv.process_with_scratch(&mut self.buf, &mut self.scratch);
        let s = 1.0 / (self.n * self.n) as f64;
        for z in self.buf.iter_mut() {
            *z *= s;
        }
    }

    fn unload(&self) -> (Array2<f64>, Array2<f64>) {
        let n = self.n;
        let re = Array2::from_shape_fn((n, n), |(r, c)| self.buf[r * n + c].re);
        let im = Array2::from_shape_fn((n, n), |(r, c)| self.buf[r * n + c].im);
        (re, im)
    }

    /// Apply the multiplier `m(|k|²)` to both fields.
    pub fn apply_pair<M: Fn(f64) -> f64>(&mut self, u1: &Array2<f64>, u2: &Array2<f64>, m: M) -> (Array2<f64>, Array2<f64>) {
        self.load(u1, Some(u2));
        self.forward();
        for (z, &k2) in self.tmp.iter_mut().zip(&self.k2) {
            *z *= m(k2);
        }
        self.inverse();
        self.unload()
    }

    pub fn apply<M: Fn(f64) -> f64>(&mut self, u: &Array2<f64>, m: M) -> Array2<f64> {
        self.load(u, None);
        self.forward();
        for (z, &k2) in self.tmp.iter_mut().zip(&self.k2) {
            *z *= m(k2);
        }
        self.inverse();
        let n = self.n;
        Array2::from_shape_fn((n, n), |(r, c)| self.buf[r * n + c].re)
    }

    /// `(∂ₓu, ∂ᵧu)`, with the Nyquist mode dropped.
    pub fn gradient(&mut self, u: &Array2<f64>) -> (Array2<f64>, Array2<f64>) {
        self.load(u, None);
        self.forward();
        let n = self.n;
        // spectrum is stored with the x wavenumber as the slow index
        for a in 0..n {
            let kx = self.ks[a];
            for b in 0..n {
                let ky = self.ks[b];
                let z = self.tmp[a * n + b];
                self.tmp[a * n + b] = Complex64::new(-kx * z.im - ky * z.re, kx * z.re - ky * z.im);
            }
        }
        self.inverse();
        self.unload()
    }

    /// `(−Δu₁, −Δu₂)`
    pub fn neg_laplacian_pair(&mut self, u1: &Array2<f64>, u2: &Array2<f64>) -> (Array2<f64>, Array2<f64>) {
        self.apply_pair(u1, u2, |k2| k2)
    }

    pub fn neg_laplacian(&mut self, u: &Array2<f64>) -> Array2<f64> {
        self.apply(u, |k2| k2)
    }

    /// Fraction of `Σ|û|²` carried by modes with `max(|k_x|, |k_y|) > k_cut`.
    pub fn power_beyond(&mut self, u: &Array2<f64>, k_cut: f64) -> f64 {
        self.load(u, None);
        self.forward();
        let mut total = 0.0;
        let mut outside = 0.0;
        for (z, &k) in self.tmp.iter().zip(&self.kmax) {
            let p = z.norm_sqr();
            total += p;
            if k > k_cut {
                outside += p;
            }
        }
        if total > 0.0 {
            outside / total
        } else {
            0.0
        }
    }
}

fn transpose(src: &[Complex64], dst: &mut [Complex64], n: usize) {
    const B: usize = 32;
    for rb in (0..n).step_by(B) {
        for cb in (0..n).step_by(B) {
            for r in rb..(rb + B).min(n) {
                for c in cb..(cb + B).min(n) {
                    dst[c * n + r] = src[r * n + c];
                }
            }
        }
    }
}
