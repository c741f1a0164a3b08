//! Semi-implicit normalized gradient flow: `−Δ` implicit through its Fourier
//! multiplier, everything else explicit, then each component renormalized.
//! A step that raises the energy is retried with half the step.
//!
//! The explicit part carries `μ̂ᵢuᵢ` as well, i.e. the flow follows the
//! projected gradient. Without it the renormalized iteration stalls at a
//! point whose residual is of order `dt·μ`.

use super::engine::{Engine, Stop};
use super::{FlowConfig, MinimizeError};
use crate::criteria::CouplingParams;

pub(super) fn drive(eng: &mut Engine, params: &CouplingParams, cfg: &FlowConfig) -> Result<(), MinimizeError> {
    let h = eng.grid.spacing();
    let mut dt = cfg.dt.unwrap_or(0.01 * h * h);
    let dt_min = dt * 1e-12;
    let (b, beta) = ([params.b1, params.b2], params.beta);
    let mut energy = eng.integrals().value(&eng.obj);
    if eng.record_trace {
        eng.trace.push(energy);
    }
    let stop = loop {
        if !energy.is_finite() {
            break Stop::NaN;
        }
        if energy < cfg.energy_floor {
            break Stop::Floor;
        }
        let ints = eng.integrals();
        let (g, proj) = eng.tangent_gradient(&ints);
        let mu = [0.5 * proj[0], 0.5 * proj[1]];
        let res = eng.norm(&g[0]).max(eng.norm(&g[1]));
        if res < cfg.grad_tol {
            break Stop::Converged;
        }
        if eng.iters >= cfg.max_iters {
            return Err(MinimizeError::MaxItersExceeded {
                iters: eng.iters,
                residual: res,
            });
        }
        let old = [eng.u[0].clone(), eng.u[1].clone()];
        let old_l = [eng.lu[0].clone(), eng.lu[1].clone()];
        loop {
            let mut rhs = [old[0].clone(), old[1].clone()];
            for i in 0..2 {
                let v = eng.potentials().get(i);
                ndarray::Zip::from(&mut rhs[i])
                    .and(&old[i])
                    .and(&old[1 - i])
                    .and(v)
                    .for_each(|r, &u, &w, &vv| *r += dt * (mu[i] * u - vv * u + b[i] * u * u * u + beta * w * w * u));
            }
            let (n1, n2) = eng.sp.apply_pair(&rhs[0], &rhs[1], |k2| 1.0 / (1.0 + dt * k2));
            eng.u = [n1, n2];
            eng.renormalize();
            eng.refresh();
            let ints = eng.integrals();
            let e_new = ints.value(&eng.obj);
            // energies are sums of terms this large; differences below
            // their round-off carry no information
            let slack = 64.0 * f64::EPSILON * (ints.kinetic[0] + ints.kinetic[1] + ints.potential[0] + ints.potential[1]);
            if e_new <= energy + slack || !e_new.is_finite() {
                energy = e_new;
                break;
            }
            dt *= 0.5;
            if dt < dt_min {
                eng.u = old;
                eng.lu = old_l;
                return Err(MinimizeError::MaxItersExceeded {
                    iters: eng.iters,
                    residual: res,
                });
            }
        }
        eng.iters += 1;
        if eng.record_trace {
            eng.trace.push(energy);
        }
    };
    match stop {
        Stop::Converged => {
            eng.take_abs();
            Ok(())
        }
        Stop::Floor => Err(MinimizeError::EnergyDiverging {
            floor: cfg.energy_floor,
            iters: eng.iters,
        }),
        _ => Err(MinimizeError::NaNDetected { iters: eng.iters }),
    }
}
