use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;

use super::{solve_nonlinear, Grid1D, NonlinearOptions, Protocol};
use crate::analytic::ImpedancePoint;
use crate::kinetics::{KineticsSpec, OcpCurve};
use crate::scaling::PhysicalCellParams;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EisOptions {
    pub grid: Grid1D,
    /// Voltage amplitude, V.
    pub amplitude: f64,
    pub periods: usize,
    /// Leading periods dropped before fitting.
    pub discard: usize,
    pub steps_per_period: usize,
    /// Combine runs at `steps_per_period` and half of it to cancel the first-order
    /// time-stepping error.
    pub richardson: bool,
}

impl Default for EisOptions {
    fn default() -> Self {
        EisOptions {
            grid: Grid1D { n_cells: 40 },
            amplitude: 5e-3,
            periods: 10,
            discard: 5,
            steps_per_period: 256,
            richardson: true,
        }
    }
}

/// Impedance of the nonlinear model by sinusoidal voltage forcing about rest at
/// `filling`, one independent run per frequency (Hz).
pub fn extract_impedance(
    params: &PhysicalCellParams,
    kinetics: &KineticsSpec,
    ocp: &OcpCurve,
    filling: f64,
    frequencies_hz: &[f64],
    options: &EisOptions,
) -> Result<Vec<ImpedancePoint>> {
    if options.discard >= options.periods {
        return Err(Error::invalid("discard", "must leave at least one period to fit"));
    }
    if options.steps_per_period < 8 {
        return Err(Error::invalid("steps_per_period", "need at least 8 steps per period"));
    }
    frequencies_hz
        .par_iter()
        .map(|&hz| {
            if !(hz > 0.0) {
                return Err(Error::invalid("frequency", format!("must be positive, got {hz}")));
            }
            let fine = single_frequency(params, kinetics, ocp, filling, hz, options.steps_per_period, options)?;
            let z = if options.richardson {
                let coarse =
                    single_frequency(params, kinetics, ocp, filling, hz, options.steps_per_period / 2, options)?;
                2.0 * fine - coarse
            } else {
                fine
            };
            Ok(ImpedancePoint { omega: TAU * hz, z })
        })
        .collect()
}

fn single_frequency(
    params: &PhysicalCellParams,
    kinetics: &KineticsSpec,
    ocp: &OcpCurve,
    filling: f64,
    hz: f64,
    steps: usize,
    options: &EisOptions,
) -> Result<Complex64> {
    let omega = TAU * hz;
    let period = 1.0 / hz;
    let offset = ocp.ocp(filling)?;
    let total = options.periods * steps;
    let mut opts = NonlinearOptions::new(options.grid, period / steps as f64, period * options.periods as f64);
    opts.fixed_step = true;
    let protocol = Protocol::Sinusoid {
        offset,
        amplitude: options.amplitude,
        omega,
    };
    let sol = solve_nonlinear(params, kinetics, ocp, protocol, filling, &opts)?;
    if sol.times.len() < total + 1 {
        return Err(Error::numerical("impedance extraction", "run ended early"));
    }
    let start = options.discard * steps + 1;
    let t0 = sol.times[start];
    let window = sol.times[total] - t0;
    // Least squares on [1, τ, sin ωt, cos ωt], τ = (t − t0)/window − ½.
    let mut normal = [[0.0; 4]; 4];
    let mut rhs = [0.0; 4];
    for k in start..=total {
        let t = sol.times[k];
        let basis = [1.0, (t - t0) / window - 0.5, (omega * t).sin(), (omega * t).cos()];
        for a in 0..4 {
            rhs[a] += basis[a] * sol.current[k];
            for b in 0..4 {
                normal[a][b] += basis[a] * basis[b];
            }
        }
    }
    let coef = solve4(normal, rhs)?;
    // I = b sin ωt + c cos ωt = Im((b + i c) e^{iωt}); current is cathodic.
    let phasor = Complex64::new(coef[2], coef[3]);
    Ok(-options.amplitude / phasor)
}

fn solve4(mut a: [[f64; 4]; 4], mut b: [f64; 4]) -> Result<[f64; 4]> {
    for k in 0..4 {
        let p = (k..4).max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs())).unwrap_or(k);
        if a[p][k].abs() < 1e-300 {
            return Err(Error::numerical("impedance extraction", "singular fit"));
        }
        a.swap(k, p);
        b.swap(k, p);
        for i in k + 1..4 {
            let l = a[i][k] / a[k][k];
            for j in k..4 {
                a[i][j] -= l * a[k][j];
            }
            b[i] -= l * b[k];
        }
    }
    let mut x = [0.0; 4];
    for k in (0..4).rev() {
        let s: f64 = (k + 1..4).map(|j| a[k][j] * x[j]).sum();
        x[k] = (b[k] - s) / a[k][k];
    }
    Ok(x)
}
