use super::{require_positive, LeanCell};
use crate::numerics::{integrate_ode, linspace};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseOptions {
    pub points: usize,
    /// Integrate the nonlinear mean-filling ODE instead of using the exponential.
    pub nonlinear: bool,
}

impl Default for PulseOptions {
    fn default() -> Self {
        PulseOptions {
            points: 400,
            nonlinear: false,
        }
    }
}

/// Current response to a voltage step. Times are dimensionless (t/t_p) and the current
/// is the dimensionless rate of change of mean filling (positive on lithiation).
#[derive(Debug, Clone, PartialEq)]
pub struct CurrentTransient {
    pub times: Vec<f64>,
    pub current: Vec<f64>,
    pub equilibrium_filling: f64,
    /// Linear decay rate X′(c̃_eq) < 0.
    pub rate: f64,
}

/// X(c) = −Da_p f (Δφ̃_app − Δφ̃_eq(c)) tanhΛ/Λ: the rate of change of mean filling at a
/// held voltage.
fn filling_rate(cell: &LeanCell, c: f64, applied: f64) -> f64 {
    let f = cell.prefactor(c);
    let (u, _) = cell.ocp.eval_unchecked(c);
    let lambda = (cell.groups.da_w * f).sqrt();
    -cell.groups.da_p * f * (applied - u) / cell.thermal_voltage * tanh_ratio(lambda)
}

fn tanh_ratio(lambda: f64) -> f64 {
    if lambda < 1e-4 {
        1.0 - lambda * lambda / 3.0
    } else {
        lambda.tanh() / lambda
    }
}

/// Current after stepping the electrode voltage to `applied_volts` from rest at
/// `initial_filling`, over dimensionless `duration`.
pub fn pulse_current(
    cell: &LeanCell,
    initial_filling: f64,
    applied_volts: f64,
    duration: f64,
    options: PulseOptions,
) -> Result<CurrentTransient> {
    require_positive("duration", duration)?;
    if options.points < 2 {
        return Err(Error::invalid("points", "need at least two time points"));
    }
    let c_eq = if cell.ocp.ocp(initial_filling)? == applied_volts {
        initial_filling
    } else {
        cell.ocp.inverse(applied_volts)?
    };
    let f = cell.prefactor(c_eq);
    let lambda = (cell.groups.da_w * f).sqrt();
    let rate = cell.groups.da_p * f * cell.ocp_slope(c_eq)? * tanh_ratio(lambda);
    let times = linspace(0.0, duration, options.points);
    let current = if options.nonlinear {
        let fill = integrate_ode(
            |_, c| filling_rate(cell, c, applied_volts),
            0.0,
            initial_filling,
            &times,
            1e-10,
            1e-13,
        )?;
        fill.iter().map(|&c| filling_rate(cell, c, applied_volts)).collect()
    } else {
        let amplitude = rate * (initial_filling - c_eq);
        times.iter().map(|&t| amplitude * (rate * t).exp()).collect()
    };
    Ok(CurrentTransient {
        times,
        current,
        equilibrium_filling: c_eq,
        rate,
    })
}
