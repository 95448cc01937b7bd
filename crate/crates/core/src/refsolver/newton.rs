use crate::numerics::BandMatrix;
use crate::{Error, Result};

/// Unknowns per grid cell.
pub(crate) const VARS: usize = 4;
/// Half-bandwidth of a nearest-neighbour coupled system with `VARS` unknowns per cell.
pub(crate) const BAND: usize = 2 * VARS - 1;

pub(crate) trait DiscreteSystem {
    fn residual(&self, x: &[f64], r: &mut [f64]);

    /// Banded Jacobian; finite differences with three-colour cell grouping by default.
    fn jacobian(&self, x: &[f64], r0: &[f64], jac: &mut BandMatrix) {
        fd_jacobian(self, x, r0, jac);
    }

    /// Shrinks a Newton update so the next iterate stays admissible.
    fn limit_step(&self, _x: &[f64], _dx: &mut [f64]) {}
}

fn fd_jacobian<S: DiscreteSystem + ?Sized>(system: &S, x: &[f64], r0: &[f64], jac: &mut BandMatrix) {
    let n = x.len();
    let cells = n / VARS;
    jac.clear();
    let mut xp = x.to_vec();
    let mut rp = vec![0.0; n];
    for colour in 0..3 {
        for v in 0..VARS {
            let cols: Vec<usize> = (colour..cells).step_by(3).map(|c| c * VARS + v).collect();
            let steps: Vec<f64> = cols.iter().map(|&j| 1e-7 * x[j].abs().max(1.0)).collect();
            for (&j, &h) in cols.iter().zip(&steps) {
                xp[j] = x[j] + h;
            }
            system.residual(&xp, &mut rp);
            for (&j, &h) in cols.iter().zip(&steps) {
                xp[j] = x[j];
                let cell = j / VARS;
                let lo = cell.saturating_sub(1) * VARS;
                let hi = ((cell + 2) * VARS).min(n);
                for i in lo..hi {
                    let d = (rp[i] - r0[i]) / h;
                    if d != 0.0 {
                        jac.set(i, j, d);
                    }
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct NewtonSettings {
    pub max_iterations: usize,
    pub tolerance: f64,
}

/// Newton iteration in place. Converged when the largest update falls below the
/// tolerance.
pub(crate) fn newton<S: DiscreteSystem>(system: &S, x: &mut [f64], settings: NewtonSettings) -> Result<usize> {
    let n = x.len();
    let mut r = vec![0.0; n];
    let mut jac = BandMatrix::zeros(n, BAND, BAND);
    for it in 1..=settings.max_iterations {
        system.residual(x, &mut r);
        if r.iter().any(|v| !v.is_finite()) {
            return Err(Error::numerical("newton", "non-finite residual"));
        }
        system.jacobian(x, &r, &mut jac);
        jac.factorize()?;
        let mut dx: Vec<f64> = r.iter().map(|v| -v).collect();
        jac.solve(&mut dx);
        system.limit_step(x, &mut dx);
        let mut largest = 0.0f64;
        for (xi, di) in x.iter_mut().zip(&dx) {
            *xi += di;
            largest = largest.max(di.abs());
        }
        if !largest.is_finite() {
            return Err(Error::numerical("newton", "non-finite update"));
        }
        if largest < settings.tolerance {
            return Ok(it);
        }
    }
    Err(Error::numerical("newton", format!("no convergence in {} iterations", settings.max_iterations)))
}
