//! The coupled energy
//! `E(u₁,u₂) = Σᵢ ∫(|∇uᵢ|² + Vᵢuᵢ² − (bᵢ/2)uᵢ⁴) − β∫u₁²u₂²`
//! and its unconstrained L² gradient.

use ndarray::{Array2, Zip};

use super::{dot, FieldError, Field2D, Grid2D, Spectral, MASS_TOL};
use crate::criteria::CouplingParams;

/// Trap values at the grid nodes for both components.
#[derive(Debug, Clone)]
pub struct Potentials {
    pub v1: Array2<f64>,
    pub v2: Array2<f64>,
}

impl Potentials {
    pub fn zero(grid: &Grid2D) -> Self {
        Self {
            v1: Array2::zeros((grid.n, grid.n)),
            v2: Array2::zeros((grid.n, grid.n)),
        }
    }

    pub fn from_spec(spec: &super::PotentialSpec, grid: &Grid2D) -> Self {
        let (v1, v2) = super::eval_potential(spec, grid);
        Self { v1, v2 }
    }

    pub fn get(&self, i: usize) -> &Array2<f64> {
        if i == 0 {
            &self.v1
        } else {
            &self.v2
        }
    }
}

/// The separate integrals that make up the energy.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EnergyParts {
    /// `∫|∇uᵢ|²`
    pub kinetic: [f64; 2],
    /// `∫Vᵢuᵢ²`
    pub potential: [f64; 2],
    /// `∫uᵢ⁴`
    pub quartic: [f64; 2],
    /// `∫u₁²u₂²`
    pub cross: f64,
}

impl EnergyParts {
    pub fn total(&self, params: &CouplingParams) -> f64 {
        let b = [params.b1, params.b2];
        (0..2)
            .map(|i| self.kinetic[i] + self.potential[i] - 0.5 * b[i] * self.quartic[i])
            .sum::<f64>()
            - params.beta * self.cross
    }

    /// `∫(u₁² − u₂²)²`
    pub fn diff2(&self) -> f64 {
        self.quartic[0] + self.quartic[1] - 2.0 * self.cross
    }
}

/// Parts of the energy given `−Δuᵢ` already computed.
pub(crate) fn parts_with(u1: &Array2<f64>, u2: &Array2<f64>, l1: &Array2<f64>, l2: &Array2<f64>, pot: &Potentials, area: f64) -> EnergyParts {
    let mut p = [0.0f64; 2];
    let mut q = [0.0f64; 2];
    let mut c = 0.0f64;
    Zip::from(u1).and(u2).and(&pot.v1).and(&pot.v2).for_each(|&a, &b, &va, &vb| {
        let (a2, b2) = (a * a, b * b);
        p[0] += va * a2;
        p[1] += vb * b2;
        q[0] += a2 * a2;
        q[1] += b2 * b2;
        c += a2 * b2;
    });
    EnergyParts {
        kinetic: [area * dot(u1, l1), area * dot(u2, l2)],
        potential: [area * p[0], area * p[1]],
        quartic: [area * q[0], area * q[1]],
        cross: area * c,
    }
}

fn check_mass(u1: &Field2D, u2: &Field2D) -> Result<(), FieldError> {
    for (i, u) in [u1, u2].into_iter().enumerate() {
        let m = u.mass();
        if !((m - 1.0).abs() <= MASS_TOL) {
            return Err(FieldError::MassViolation { component: i + 1, mass: m });
        }
    }
    if u1.grid != u2.grid {
        return Err(FieldError::InvalidInput("components live on different grids".into()));
    }
    Ok(())
}

/// All energy integrals, without the mass check.
pub fn energy_parts(u1: &Field2D, u2: &Field2D, pot: &Potentials, spectral: &mut Spectral) -> EnergyParts {
    let (l1, l2) = spectral.neg_laplacian_pair(&u1.values, &u2.values);
    parts_with(&u1.values, &u2.values, &l1, &l2, pot, u1.grid.cell_area())
}

/// `E_{b₁,b₂,β}(u₁,u₂)`; both masses must be 1.
pub fn energy(u1: &Field2D, u2: &Field2D, params: &CouplingParams, pot: &Potentials, spectral: &mut Spectral) -> Result<f64, FieldError> {
    check_mass(u1, u2)?;
    Ok(energy_parts(u1, u2, pot, spectral).total(params))
}

/// `gᵢ = 2(−Δuᵢ + Vᵢuᵢ − bᵢuᵢ³ − βuⱼ²uᵢ)` given `−Δuᵢ`.
pub fn gradient_parts(
    u1: &Array2<f64>,
    u2: &Array2<f64>,
    l1: &Array2<f64>,
    l2: &Array2<f64>,
    params: &CouplingParams,
    pot: &Potentials,
) -> (Array2<f64>, Array2<f64>) {
    let (b1, b2, beta) = (params.b1, params.b2, params.beta);
    let mut g1 = Array2::zeros(u1.dim());
    let mut g2 = Array2::zeros(u1.dim());
    Zip::from(&mut g1)
        .and(&mut g2)
        .and(u1)
        .and(u2)
        .and(l1)
        .and(l2)
        .for_each(|g1, g2, &a, &b, &la, &lb| {
            let (a2, b2s) = (a * a, b * b);
            *g1 = la - b1 * a2 * a - beta * b2s * a;
            *g2 = lb - b2 * b2s * b - beta * a2 * b;
        });
    Zip::from(&mut g1).and(u1).and(&pot.v1).for_each(|g, &a, &v| *g = 2.0 * (*g + v * a));
    Zip::from(&mut g2).and(u2).and(&pot.v2).for_each(|g, &b, &v| *g = 2.0 * (*g + v * b));
    (g1, g2)
}

/// The unconstrained L² gradient of the energy; both masses must be 1.
pub fn gradient(
    u1: &Field2D,
    u2: &Field2D,
    params: &CouplingParams,
    pot: &Potentials,
    spectral: &mut Spectral,
) -> Result<(Array2<f64>, Array2<f64>), FieldError> {
    check_mass(u1, u2)?;
    let (l1, l2) = spectral.neg_laplacian_pair(&u1.values, &u2.values);
    Ok(gradient_parts(&u1.values, &u2.values, &l1, &l2, params, pot))
}

/// `E^i_a(u) = ∫|∇u|² + Vu² − (a/2)∫u⁴` for one component.
pub fn single_energy(u: &Field2D, v: &Array2<f64>, a: f64, spectral: &mut Spectral) -> f64 {
    let l = spectral.neg_laplacian(&u.values);
    let area = u.grid.cell_area();
    let mut pv = 0.0;
    let mut q = 0.0;
    Zip::from(&u.values).and(v).for_each(|&x, &vv| {
        let x2 = x * x;
        pv += vv * x2;
        q += x2 * x2;
    });
    area * (dot(&u.values, &l) + pv - 0.5 * a * q)
}

/// `(E¹_{a₁}(u₁), E²_{a₂}(u₂), (β/2)∫(u₁²−u₂²)²)` with `aᵢ = bᵢ + β`; the
/// three sum to the coupled energy.
pub fn split_energy(u1: &Field2D, u2: &Field2D, params: &CouplingParams, pot: &Potentials, spectral: &mut Spectral) -> (f64, f64, f64) {
    let p = energy_parts(u1, u2, pot, spectral);
    let e1 = p.kinetic[0] + p.potential[0] - 0.5 * params.a1() * p.quartic[0];
    let e2 = p.kinetic[1] + p.potential[1] - 0.5 * params.a2() * p.quartic[1];
    (e1, e2, 0.5 * params.beta * p.diff2())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::PotentialSpec;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn setup() -> (Grid2D, Potentials, Spectral) {
        let g = Grid2D::new(64, 8.0).unwrap();
        let pot = Potentials::from_spec(&PotentialSpec::harmonic(), &g);
        let sp = Spectral::new(&g);
        (g, pot, sp)
    }

    fn blob(g: Grid2D, cx: f64, cy: f64, w: f64) -> Field2D {
        Field2D::from_fn(g, |x, y| (-((x - cx).powi(2) + (y - cy).powi(2)) / w).exp()).normalized()
    }

    #[test]
    fn energy_rejects_unnormalized() {
        let (g, pot, mut sp) = setup();
        let mut u = blob(g, 0.0, 0.0, 1.0);
        u.values *= 1.1;
        let v = blob(g, 0.0, 0.0, 1.0);
        let p = CouplingParams::new(1.0, 1.0, 1.0).unwrap();
        assert!(matches!(energy(&u, &v, &p, &pot, &mut sp), Err(FieldError::MassViolation { component: 1, .. })));
    }

    #[test]
    fn harmonic_gaussian_energy() {
        // ground state of −Δ + |x|² is e^{−|x|²/2}/√π with energy 2
        let (g, pot, mut sp) = setup();
        let u = blob(g, 0.0, 0.0, 2.0);
        let p = CouplingParams::new(1e-300, 1e-300, 1e-300).unwrap();
        let e = energy(&u, &u, &p, &pot, &mut sp).unwrap();
        assert!((e - 4.0).abs() < 1e-10, "{e}");
    }

    #[test]
    fn split_identity_to_roundoff() {
        let (g, pot, mut sp) = setup();
        let u1 = blob(g, 0.5, 0.0, 1.5);
        let u2 = blob(g, -0.2, 0.4, 0.8);
        let p = CouplingParams::new(3.0, 5.0, 2.5).unwrap();
        let e = energy(&u1, &u2, &p, &pot, &mut sp).unwrap();
        let (e1, e2, c) = split_energy(&u1, &u2, &p, &pot, &mut sp);
        assert!((e - (e1 + e2 + c)).abs() < 1e-12 * e.abs().max(1.0));
    }

    #[test]
    fn gradient_matches_central_differences() {
        let (g, pot, mut sp) = setup();
        let u1 = blob(g, 0.5, 0.0, 1.5);
        let u2 = blob(g, -0.2, 0.4, 0.8);
        let p = CouplingParams::new(3.0, 5.0, 2.5).unwrap();
        let (g1, g2) = gradient(&u1, &u2, &p, &pot, &mut sp).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let h = 1e-4;
        for _ in 0..5 {
            let v1 = Field2D::from_fn(g, |x, y| rng.gen_range(-1.0..1.0) * (-(x * x + y * y) / 4.0).exp());
            let v2 = Field2D::from_fn(g, |x, y| (x - y).sin() * (-(x * x + y * y) / 4.0).exp());
            let mut shift = |s: f64| {
                let a = Field2D::new(g, &u1.values + &(&v1.values * s)).unwrap();
                let b = Field2D::new(g, &u2.values + &(&v2.values * s)).unwrap();
                energy_parts(&a, &b, &pot, &mut sp).total(&p)
            };
            let fd = (shift(h) - shift(-h)) / (2.0 * h);
            let exact = g.cell_area() * (dot(&g1, &v1.values) + dot(&g2, &v2.values));
            assert!((fd - exact).abs() < 1e-6 * exact.abs().max(1.0), "{fd} vs {exact}");
        }
    }

    #[test]
    fn zero_partner_reduces_to_single_component() {
        let (g, pot, mut sp) = setup();
        let u1 = blob(g, 0.5, 0.0, 1.5);
        let zero = Field2D::zeros(g);
        let p = CouplingParams::new(3.0, 5.0, 2.5).unwrap();
        let (l1, l2) = sp.neg_laplacian_pair(&u1.values, &zero.values);
        let (g1, g2) = gradient_parts(&u1.values, &zero.values, &l1, &l2, &p, &pot);
        let lone = sp.neg_laplacian(&u1.values);
        let expect = 2.0 * (&lone + &(&pot.v1 * &u1.values) - &(u1.values.mapv(|a| a * a * a) * 3.0));
        for (a, b) in g1.iter().zip(expect.iter()) {
            assert!((a - b).abs() < 1e-10);
        }
        assert!(g2.iter().all(|&v| v.abs() < 1e-12));
    }
}
