//! Preconditioned nonlinear conjugate gradients on the product of the two
//! unit spheres `{‖u₁‖₂ = 1} × {‖u₂‖₂ = 1}`.
//!
//! Steps follow great circles `uᵢ(t) = cos(θᵢt)uᵢ + sin(θᵢt)eᵢ`, so both
//! masses stay exactly 1. Along such a curve every integral in the energy is
//! a trigonometric polynomial in `t` whose coefficients are a handful of
//! moments of `(uᵢ, eᵢ)`; the line search works on that closed form and costs
//! no transforms. `−Δuᵢ` is carried along linearly and recomputed exactly
//! every few iterations.

use std::ops::{Add, Div, Mul, Sub};

use ndarray::Array2;

use crate::criteria::CouplingParams;
use crate::fields::{Field2D, Grid2D, Potentials, Spectral};
use crate::numeric::scalar::brent_root;

/// Value and first derivative.
#[derive(Debug, Clone, Copy)]
struct D {
    v: f64,
    d: f64,
}

impl D {
    fn c(v: f64) -> Self {
        Self { v, d: 0.0 }
    }
}

impl Add for D {
    type Output = D;
    fn add(self, o: D) -> D {
        D {
            v: self.v + o.v,
            d: self.d + o.d,
        }
    }
}

impl Sub for D {
    type Output = D;
    fn sub(self, o: D) -> D {
        D {
            v: self.v - o.v,
            d: self.d - o.d,
        }
    }
}

impl Mul for D {
    type Output = D;
    fn mul(self, o: D) -> D {
        D {
            v: self.v * o.v,
            d: self.d * o.v + self.v * o.d,
        }
    }
}

impl Mul<f64> for D {
    type Output = D;
    fn mul(self, k: f64) -> D {
        D {
            v: self.v * k,
            d: self.d * k,
        }
    }
}

impl Div for D {
    type Output = D;
    fn div(self, o: D) -> D {
        D {
            v: self.v / o.v,
            d: (self.d * o.v - self.v * o.d) / (o.v * o.v),
        }
    }
}

/// What is being minimized over the unit spheres.
#[derive(Debug, Clone, Copy)]
pub(crate) enum Objective {
    /// the coupled energy with traps
    Energy(CouplingParams),
    /// kinetic sum over `(b₁/2)∫u₁⁴ + (b₂/2)∫u₂⁴ + β∫u₁²u₂²`, no traps
    Quotient(CouplingParams),
}

impl Objective {
    fn params(&self) -> &CouplingParams {
        match self {
            Objective::Energy(p) | Objective::Quotient(p) => p,
        }
    }
}

/// Integrals of the current pair.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct Integrals {
    pub kinetic: [f64; 2],
    pub potential: [f64; 2],
    pub quartic: [f64; 2],
    pub cross: f64,
}

impl Integrals {
    fn denominator(&self, p: &CouplingParams) -> f64 {
        0.5 * p.b1 * self.quartic[0] + 0.5 * p.b2 * self.quartic[1] + p.beta * self.cross
    }

    pub fn value(&self, obj: &Objective) -> f64 {
        match obj {
            Objective::Energy(p) => {
                self.kinetic[0] + self.kinetic[1] + self.potential[0] + self.potential[1]
                    - 0.5 * p.b1 * self.quartic[0]
                    - 0.5 * p.b2 * self.quartic[1]
                    - p.beta * self.cross
            }
            Objective::Quotient(p) => (self.kinetic[0] + self.kinetic[1]) / self.denominator(p),
        }
    }
}

/// Moments of `(uᵢ, eᵢ)` that determine the objective along a great circle.
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    theta: [f64; 2],
    /// `⟨u,Ku⟩, ⟨u,Ke⟩, ⟨e,Ke⟩` with `K = −Δ`
    kin: [[f64; 3]; 2],
    /// same with `K = −Δ + V`
    pot: [[f64; 3]; 2],
    /// `∫u^{4−k}e^k`, k = 0..4
    m4: [[f64; 5]; 2],
    /// `∫Xₐ Y_b` with `X ∈ {u₁², u₁e₁, e₁²}`, `Y ∈ {u₂², u₂e₂, e₂²}`
    x: [[f64; 3]; 3],
}

impl Moments {
    fn along(&self, t: f64) -> ([D; 2], [D; 2], [D; 2], D) {
        let mut cs = [(D::c(1.0), D::c(0.0)); 2];
        for i in 0..2 {
            let th = self.theta[i];
            let (s, c) = (th * t).sin_cos();
            cs[i] = (D { v: c, d: -th * s }, D { v: s, d: th * c });
        }
        let quad = |m: &[f64; 3], c: D, s: D| c * c * m[0] + c * s * (2.0 * m[1]) + s * s * m[2];
        let mut kin = [D::c(0.0); 2];
        let mut pot = [D::c(0.0); 2];
        let mut quart = [D::c(0.0); 2];
        let mut sq = [[D::c(0.0); 3]; 2];
        for i in 0..2 {
            let (c, s) = cs[i];
            kin[i] = quad(&self.kin[i], c, s);
            pot[i] = quad(&self.pot[i], c, s);
            let (c2, s2) = (c * c, s * s);
            let m = &self.m4[i];
            quart[i] = c2 * c2 * m[0]
                + c2 * c * s * (4.0 * m[1])
                + c2 * s2 * (6.0 * m[2])
                + c * s * s2 * (4.0 * m[3])
                + s2 * s2 * m[4];
            sq[i] = [c2, c * s * 2.0, s2];
        }
        let mut cross = D::c(0.0);
        for a in 0..3 {
            for b in 0..3 {
                cross = cross + sq[0][a] * sq[1][b] * self.x[a][b];
            }
        }
        (kin, pot, quart, cross)
    }

    /// Objective and its `t`-derivative along the curve.
    fn phi(&self, obj: &Objective, t: f64) -> D {
        let (kin, pot, quart, cross) = self.along(t);
        match obj {
            Objective::Energy(p) => {
                pot[0] + pot[1] - quart[0] * (0.5 * p.b1) - quart[1] * (0.5 * p.b2) - cross * p.beta
            }
            Objective::Quotient(p) => {
                (kin[0] + kin[1]) / (quart[0] * (0.5 * p.b1) + quart[1] * (0.5 * p.b2) + cross * p.beta)
            }
        }
    }
}

fn sdot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn sl(a: &Array2<f64>) -> &[f64] {
    a.as_slice().expect("standard layout")
}

fn sl_mut(a: &mut Array2<f64>) -> &mut [f64] {
    a.as_slice_mut().expect("standard layout")
}

/// Mass of a negative part below which it is not folded away.
pub(crate) const FOLD_MASS: f64 = 1e-6;

/// Why an engine run stopped.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Stop {
    Converged,
    MaxIters,
    /// objective fell below the floor
    Floor,
    NaN,
    /// no descent left at round-off level
    Stalled,
    /// one component carries almost none of the kinetic sum
    Dichotomy,
}

pub(crate) struct EngineConfig {
    pub max_iters: usize,
    pub grad_tol: f64,
    pub floor: f64,
    pub refresh_every: usize,
    /// kinetic-sum window `[lo, hi]` for the quotient gauge, and its target
    pub gauge: Option<(f64, f64, f64)>,
    /// stop once a component's share of the kinetic sum falls below this
    pub min_share: Option<f64>,
    /// line searches along dilation and translations every so many steps
    pub generators_every: Option<usize>,
}

/// Mutable solver state: the pair, `−Δ` of the pair, iteration count.
pub(crate) struct Engine<'a> {
    pub grid: Grid2D,
    pub obj: Objective,
    pot: &'a Potentials,
    pub sp: Spectral,
    pub u: [Array2<f64>; 2],
    pub lu: [Array2<f64>; 2],
    pub iters: usize,
    pub trace: Vec<f64>,
    pub record_trace: bool,
}

impl<'a> Engine<'a> {
    pub fn new(obj: Objective, pot: &'a Potentials, u1: Field2D, u2: Field2D) -> Self {
        let grid = u1.grid;
        let mut sp = Spectral::new(&grid);
        let mut u = [u1.normalized().values, u2.normalized().values];
        for ui in u.iter_mut() {
            if !ui.is_standard_layout() {
                *ui = ui.as_standard_layout().to_owned();
            }
        }
        let (l1, l2) = sp.neg_laplacian_pair(&u[0], &u[1]);
        Self {
            grid,
            obj,
            pot,
            sp,
            u,
            lu: [l1, l2],
            iters: 0,
            trace: Vec::new(),
            record_trace: false,
        }
    }

    pub fn potentials(&self) -> &Potentials {
        self.pot
    }

    fn area(&self) -> f64 {
        self.grid.cell_area()
    }

    pub fn refresh(&mut self) {
        let (l1, l2) = self.sp.neg_laplacian_pair(&self.u[0], &self.u[1]);
        self.lu = [l1, l2];
    }

    pub fn renormalize(&mut self) {
        for i in 0..2 {
            let m = self.area() * sdot(sl(&self.u[i]), sl(&self.u[i]));
            let s = 1.0 / m.sqrt();
            self.u[i] *= s;
            self.lu[i] *= s;
        }
    }

    pub fn integrals(&self) -> Integrals {
        let a = self.area();
        let (u1, u2) = (sl(&self.u[0]), sl(&self.u[1]));
        let (v1, v2) = (sl(&self.pot.v1), sl(&self.pot.v2));
        let mut p = [0.0; 2];
        let mut q = [0.0; 2];
        let mut c = 0.0;
        for k in 0..u1.len() {
            let (x2, y2) = (u1[k] * u1[k], u2[k] * u2[k]);
            p[0] += v1[k] * x2;
            p[1] += v2[k] * y2;
            q[0] += x2 * x2;
            q[1] += y2 * y2;
            c += x2 * y2;
        }
        Integrals {
            kinetic: [a * sdot(u1, sl(&self.lu[0])), a * sdot(u2, sl(&self.lu[1]))],
            potential: [a * p[0], a * p[1]],
            quartic: [a * q[0], a * q[1]],
            cross: a * c,
        }
    }

    /// Unconstrained gradient of the objective at the current pair.
    pub fn raw_gradient(&self, ints: &Integrals) -> [Array2<f64>; 2] {
        let p = self.obj.params();
        let (b, beta) = ([p.b1, p.b2], p.beta);
        let (scale, coupling, with_pot) = match self.obj {
            Objective::Energy(_) => (2.0, 1.0, true),
            Objective::Quotient(_) => {
                let n = ints.denominator(p);
                let r = (ints.kinetic[0] + ints.kinetic[1]) / n;
                (2.0 / n, r, false)
            }
        };
        let mut g = [Array2::zeros(self.u[0].dim()), Array2::zeros(self.u[0].dim())];
        for i in 0..2 {
            let j = 1 - i;
            let (ui, uj, li) = (sl(&self.u[i]), sl(&self.u[j]), sl(&self.lu[i]));
            let v = sl(self.pot.get(i));
            let gi = sl_mut(&mut g[i]);
            for k in 0..ui.len() {
                let x = ui[k];
                let nl = b[i] * x * x * x + beta * uj[k] * uj[k] * x;
                let trap = if with_pot { v[k] * x } else { 0.0 };
                gi[k] = scale * (li[k] + trap - coupling * nl);
            }
        }
        g
    }

    /// `(Riemannian gradient, ⟨gᵢ,uᵢ⟩)` of the objective.
    pub fn tangent_gradient(&self, ints: &Integrals) -> ([Array2<f64>; 2], [f64; 2]) {
        let mut g = self.raw_gradient(ints);
        let a = self.area();
        let mut proj = [0.0; 2];
        for i in 0..2 {
            proj[i] = a * sdot(sl(&g[i]), sl(&self.u[i]));
            g[i].scaled_add(-proj[i], &self.u[i]);
        }
        (g, proj)
    }

    pub fn norm(&self, x: &Array2<f64>) -> f64 {
        (self.area() * sdot(sl(x), sl(x))).sqrt()
    }

    fn project(&self, x: &mut [Array2<f64>; 2]) {
        let a = self.area();
        for i in 0..2 {
            let c = a * sdot(sl(&x[i]), sl(&self.u[i]));
            x[i].scaled_add(-c, &self.u[i]);
        }
    }

    fn moments(&mut self, d: &[Array2<f64>; 2]) -> (Moments, [Array2<f64>; 2], [Array2<f64>; 2]) {
        let a = self.area();
        let mut m = Moments::default();
        let mut e = [Array2::zeros(d[0].dim()), Array2::zeros(d[0].dim())];
        for i in 0..2 {
            let th = self.norm(&d[i]);
            m.theta[i] = th;
            if th > 0.0 {
                e[i] = &d[i] / th;
            }
        }
        let (le1, le2) = self.sp.neg_laplacian_pair(&e[0], &e[1]);
        let le = [le1, le2];
        for i in 0..2 {
            let (u, ei, lu, lei, v) = (sl(&self.u[i]), sl(&e[i]), sl(&self.lu[i]), sl(&le[i]), sl(self.pot.get(i)));
            let (mut ue, mut ee, mut vuu, mut vue, mut vee) = (0.0, 0.0, 0.0, 0.0, 0.0);
            let mut q = [0.0; 5];
            for k in 0..u.len() {
                let (x, y) = (u[k], ei[k]);
                ue += x * lei[k];
                ee += y * lei[k];
                vuu += v[k] * x * x;
                vue += v[k] * x * y;
                vee += v[k] * y * y;
                let (x2, y2) = (x * x, y * y);
                q[0] += x2 * x2;
                q[1] += x2 * x * y;
                q[2] += x2 * y2;
                q[3] += x * y * y2;
                q[4] += y2 * y2;
            }
            let uu = sdot(u, lu);
            m.kin[i] = [a * uu, a * ue, a * ee];
            m.pot[i] = [a * (uu + vuu), a * (ue + vue), a * (ee + vee)];
            for k in 0..5 {
                m.m4[i][k] = a * q[k];
            }
        }
        let (u1, e1, u2, e2) = (sl(&self.u[0]), sl(&e[0]), sl(&self.u[1]), sl(&e[1]));
        let mut x = [[0.0; 3]; 3];
        for k in 0..u1.len() {
            let xs = [u1[k] * u1[k], u1[k] * e1[k], e1[k] * e1[k]];
            let ys = [u2[k] * u2[k], u2[k] * e2[k], e2[k] * e2[k]];
            for p in 0..3 {
                for q in 0..3 {
                    x[p][q] += xs[p] * ys[q];
                }
            }
        }
        for p in 0..3 {
            for q in 0..3 {
                m.x[p][q] = a * x[p][q];
            }
        }
        (m, e, le)
    }

    /// Smallest positive stationary point of the objective along the curve
    /// where it turns from decreasing to increasing.
    fn line_search(&self, m: &Moments) -> Option<f64> {
        let th = m.theta[0].max(m.theta[1]);
        if !(th > 0.0) {
            return None;
        }
        let dphi = |t: f64| m.phi(&self.obj, t).d;
        if !(dphi(0.0) < 0.0) {
            return None;
        }
        let t_hi = 0.5 * std::f64::consts::PI / th;
        let mut prev = 0.0;
        for k in (0..=100).rev() {
            let t = t_hi * (-(k as f64) * 0.25 * std::f64::consts::LN_2).exp();
            let d = dphi(t);
            if d.is_nan() {
                return None;
            }
            if d >= 0.0 {
                return brent_root(dphi, prev, t, 1e-15 * t, 200).or(Some(t));
            }
            prev = t;
        }
        Some(t_hi)
    }

    /// Run conjugate gradients until the tangent gradient drops below the
    /// tolerance or a stop condition fires.
    pub fn run(&mut self, cfg: &EngineConfig) -> (Stop, f64) {
        let mut d_prev: Option<[Array2<f64>; 2]> = None;
        let mut g_prev: Option<[Array2<f64>; 2]> = None;
        let mut zg_prev = 0.0;
        let mut since_refresh = 0usize;
        let a = self.area();
        loop {
            let ints = self.integrals();
            let value = ints.value(&self.obj);
            if !value.is_finite() {
                return (Stop::NaN, f64::NAN);
            }
            if self.record_trace {
                self.trace.push(value);
            }
            if matches!(self.obj, Objective::Energy(_)) && value < cfg.floor {
                return (Stop::Floor, f64::NAN);
            }
            let (g, _) = self.tangent_gradient(&ints);
            let res = self.norm(&g[0]).max(self.norm(&g[1]));
            if !res.is_finite() {
                return (Stop::NaN, res);
            }
            if res < cfg.grad_tol {
                return (Stop::Converged, res);
            }
            if self.iters >= cfg.max_iters {
                return (Stop::MaxIters, res);
            }

            if let Some(share) = cfg.min_share {
                let k = ints.kinetic[0] + ints.kinetic[1];
                if ints.kinetic[0].min(ints.kinetic[1]) < share * k || self.touches_box() {
                    return (Stop::Dichotomy, res);
                }
            }

            if let Some((lo, hi, target)) = cfg.gauge {
                let k = ints.kinetic[0] + ints.kinetic[1];
                if k < lo || k > hi {
                    if self.regauge((target / k).sqrt()).is_err() {
                        let stop = if cfg.min_share.is_some() { Stop::Dichotomy } else { Stop::Stalled };
                        return (stop, res);
                    }
                    d_prev = None;
                    g_prev = None;
                    continue;
                }
            }

            // S(c − Δ)⁻¹S with S = (c/(c + V))^{1/2} and c set by the
            // kinetic scale: the trap dominates the Hessian far out
            let c = (0.5 * (ints.kinetic[0] + ints.kinetic[1])).max(1.0);
            let with_pot = matches!(self.obj, Objective::Energy(_));
            let mut sg = [g[0].clone(), g[1].clone()];
            if with_pot {
                for i in 0..2 {
                    ndarray::Zip::from(&mut sg[i])
                        .and(self.pot.get(i))
                        .for_each(|x, &v| *x *= (c / (c + v)).sqrt());
                }
            }
            let (z1, z2) = self.sp.apply_pair(&sg[0], &sg[1], |k2| 1.0 / (c + k2));
            let mut z = [z1, z2];
            if with_pot {
                for i in 0..2 {
                    ndarray::Zip::from(&mut z[i])
                        .and(self.pot.get(i))
                        .for_each(|x, &v| *x *= (c / (c + v)).sqrt());
                }
            }
            self.project(&mut z);
            let zg = a * (sdot(sl(&z[0]), sl(&g[0])) + sdot(sl(&z[1]), sl(&g[1])));

            let mut dir = [-&z[0], -&z[1]];
            if let (Some(dp), Some(gp)) = (d_prev.as_mut(), g_prev.as_mut()) {
                self.project(dp);
                self.project(gp);
                let num = a * (0..2)
                    .map(|i| sdot(sl(&z[i]), sl(&g[i])) - sdot(sl(&z[i]), sl(&gp[i])))
                    .sum::<f64>();
                let beta = (num / zg_prev).max(0.0);
                if beta.is_finite() && beta > 0.0 {
                    for i in 0..2 {
                        dir[i].scaled_add(beta, &dp[i]);
                    }
                }
                let slope = a * (sdot(sl(&dir[0]), sl(&g[0])) + sdot(sl(&dir[1]), sl(&g[1])));
                if !(slope < 0.0) {
                    dir = [-&z[0], -&z[1]];
                }
            }

            let (m, e, le) = self.moments(&dir);
            let t = match self.line_search(&m) {
                Some(t) => t,
                None => {
                    if d_prev.is_none() {
                        return (Stop::Stalled, res);
                    }
                    d_prev = None;
                    g_prev = None;
                    continue;
                }
            };
            self.advance(&m, &e, &le, t);
            self.iters += 1;
            since_refresh += 1;
            if since_refresh >= cfg.refresh_every {
                self.renormalize();
                self.refresh();
                since_refresh = 0;
            } else {
                self.renormalize();
            }
            if let Some(every) = cfg.generators_every {
                if self.iters % every == 0 {
                    self.generator_steps();
                }
            }
            // transported quantities live at the new point after projection
            let mut dp = dir;
            for i in 0..2 {
                dp[i] *= t;
            }
            d_prev = Some(dp);
            g_prev = Some(g);
            zg_prev = zg;
        }
    }

    /// Whether either component keeps more than `10⁻⁴` of its peak on the
    /// outermost ring of nodes.
    fn touches_box(&self) -> bool {
        let (a, b) = self.fields();
        [a, b].iter().any(|f| {
            let peak = f.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            f.boundary_max() > 1e-4 * peak
        })
    }

    /// Dilate the pair about the origin by `lambda`.
    fn regauge(&mut self, lambda: f64) -> Result<(), crate::fields::FieldError> {
        for i in 0..2 {
            let f = Field2D {
                grid: self.grid,
                values: std::mem::take(&mut self.u[i]),
            };
            let r = crate::fields::rescale(&f, lambda);
            match r {
                Ok(v) => self.u[i] = v.values,
                Err(err) => {
                    self.u[i] = f.values;
                    return Err(err);
                }
            }
        }
        self.renormalize();
        self.refresh();
        Ok(())
    }

    /// Replace both components by their absolute values and recompute `−Δ`.
    fn advance(&mut self, m: &Moments, e: &[Array2<f64>; 2], le: &[Array2<f64>; 2], t: f64) {
        for i in 0..2 {
            let (s, c) = (m.theta[i] * t).sin_cos();
            self.u[i] *= c;
            self.u[i].scaled_add(s, &e[i]);
            self.lu[i] *= c;
            self.lu[i].scaled_add(s, &le[i]);
        }
    }

    /// Exact line searches along the generators of dilation and of the two
    /// translations, both components moving together. Near the critical
    /// coupling the dilation mode is nearly flat and preconditioned CG alone
    /// crawls along it.
    fn generator_steps(&mut self) {
        let a = self.area();
        let xs = self.grid.coords();
        let mut grads = Vec::with_capacity(2);
        let mut centers = [[0.0; 2]; 2];
        for i in 0..2 {
            let (ux, uy) = self.sp.gradient(&self.u[i]);
            let (mut mx, mut my) = (0.0, 0.0);
            for ((r, c), &v) in self.u[i].indexed_iter() {
                mx += xs[c] * v * v;
                my += xs[r] * v * v;
            }
            centers[i] = [a * mx, a * my];
            grads.push((ux, uy));
        }
        for kind in 0..3 {
            let mut d = [Array2::zeros(self.u[0].dim()), Array2::zeros(self.u[0].dim())];
            for i in 0..2 {
                let (ux, uy) = &grads[i];
                d[i] = match kind {
                    0 => {
                        let [cx, cy] = centers[i];
                        let mut di = self.u[i].clone();
                        ndarray::Zip::indexed(&mut di).and(ux).and(uy).for_each(|(r, c), w, &gx, &gy| {
                            *w += (xs[c] - cx) * gx + (xs[r] - cy) * gy;
                        });
                        di
                    }
                    1 => ux.clone(),
                    _ => uy.clone(),
                };
            }
            self.project(&mut d);
            let ints = self.integrals();
            let (g, _) = self.tangent_gradient(&ints);
            let slope = a * (sdot(sl(&d[0]), sl(&g[0])) + sdot(sl(&d[1]), sl(&g[1])));
            if slope == 0.0 || !slope.is_finite() {
                continue;
            }
            if slope > 0.0 {
                for di in d.iter_mut() {
                    di.mapv_inplace(|v| -v);
                }
            }
            let (m, e, le) = self.moments(&d);
            if let Some(t) = self.line_search(&m) {
                self.advance(&m, &e, &le, t);
                self.renormalize();
            }
        }
    }

    /// Make each component non-negative. A negative part carrying less than
    /// [`FOLD_MASS`] of the mass is aliasing ripple, left alone: folding it
    /// puts kinks into a converged field, and where the trap is large those
    /// kinks dominate the residual.
    pub fn take_abs(&mut self) {
        let a = self.area();
        let mut folded = false;
        for i in 0..2 {
            let (neg, pos) = self.u[i].iter().fold((0.0, 0.0), |(n, p), &v| {
                if v < 0.0 {
                    (n + v * v, p)
                } else {
                    (n, p + v * v)
                }
            });
            let (neg, pos) = (a * neg, a * pos);
            let neg = if pos < neg {
                self.u[i].mapv_inplace(|v| -v);
                self.lu[i].mapv_inplace(|v| -v);
                pos
            } else {
                neg
            };
            if neg > FOLD_MASS {
                self.u[i].mapv_inplace(f64::abs);
                folded = true;
            }
        }
        if folded {
            self.renormalize();
            self.refresh();
        }
    }

    pub fn fields(&self) -> (Field2D, Field2D) {
        (
            Field2D {
                grid: self.grid,
                values: self.u[0].clone(),
            },
            Field2D {
                grid: self.grid,
                values: self.u[1].clone(),
            },
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{PotentialSpec, Potentials};

    fn blob(g: Grid2D, cx: f64, w: f64) -> Field2D {
        Field2D::from_fn(g, |x, y| (-((x - cx).powi(2) + y * y) / w).exp()).normalized()
    }

    #[test]
    fn closed_form_matches_direct_evaluation() {
        let g = Grid2D::new(64, 8.0).unwrap();
        let pot = Potentials::from_spec(&PotentialSpec::harmonic(), &g);
        let p = CouplingParams::new(3.0, 5.0, 2.5).unwrap();
        for obj in [Objective::Energy(p), Objective::Quotient(p)] {
            let mut eng = Engine::new(obj, &pot, blob(g, 0.3, 1.0), blob(g, -0.4, 2.0));
            let ints = eng.integrals();
            let (grad, _) = eng.tangent_gradient(&ints);
            let dir = [-&grad[0] * 0.1, &grad[1] * 0.0 - &blob(g, 1.0, 0.5).values * 0.01];
            let mut dir = dir;
            eng.project(&mut dir);
            let (m, e, _) = eng.moments(&dir);
            assert!((m.phi(&obj, 0.0).v - ints.value(&obj)).abs() < 1e-12 * ints.value(&obj).abs());
            let slope = g.cell_area() * (sdot(sl(&grad[0]), sl(&dir[0])) + sdot(sl(&grad[1]), sl(&dir[1])));
            assert!((m.phi(&obj, 0.0).d - slope).abs() < 1e-9 * slope.abs(), "{} vs {slope}", m.phi(&obj, 0.0).d);
            let t = 0.7;
            let mut moved = Engine::new(obj, &pot, blob(g, 0.3, 1.0), blob(g, -0.4, 2.0));
            for i in 0..2 {
                let (s, c) = (m.theta[i] * t).sin_cos();
                moved.u[i] = &moved.u[i] * c + &e[i] * s;
            }
            moved.refresh();
            let direct = moved.integrals().value(&obj);
            assert!((m.phi(&obj, t).v - direct).abs() < 1e-11 * direct.abs(), "{} vs {direct}", m.phi(&obj, t).v);
        }
    }
}
