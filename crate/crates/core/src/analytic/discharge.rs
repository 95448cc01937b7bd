use super::{LeanCell, OverpotentialProfile};
use crate::numerics::bisect;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    /// Voltage reached the cutoff.
    Cutoff,
    /// Mean filling reached the upper end of the OCP table.
    FillingLimit,
    /// The open-circuit voltage at the start was already below the cutoff.
    Immediate,
    /// The requested end time was reached.
    EndTime,
}

/// Analytic constant-current discharge. `times` is dimensionless (t/t_p), so
/// `mean_filling = initial + times` holds exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct GalvanostaticSolution {
    pub times: Vec<f64>,
    pub mean_filling: Vec<f64>,
    pub voltage: Vec<f64>,
    pub lambda_history: Vec<f64>,
    pub eta_profiles: Option<Vec<Vec<f64>>>,
    pub termination: Termination,
}

impl GalvanostaticSolution {
    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// (mean filling, voltage) pairs.
    pub fn curve(&self) -> Vec<(f64, f64)> {
        self.mean_filling.iter().copied().zip(self.voltage.iter().copied()).collect()
    }
}

/// Evaluates the discharge voltage on `points` uniformly spaced fillings from
/// `initial_filling` to the top of the OCP table, stopping at `cutoff` volts. When
/// `profile_points > 0` the overpotential profile is stored at every step.
pub fn simulate_discharge(
    cell: &LeanCell,
    initial_filling: f64,
    cutoff: f64,
    points: usize,
    profile_points: usize,
) -> Result<GalvanostaticSolution> {
    let (_, c_max) = cell.ocp.range();
    let ocv0 = cell.ocp.ocp(initial_filling)?;
    if points < 2 {
        return Err(Error::invalid("points", "need at least two grid points"));
    }
    let mut sol = GalvanostaticSolution {
        times: Vec::new(),
        mean_filling: Vec::new(),
        voltage: Vec::new(),
        lambda_history: Vec::new(),
        eta_profiles: (profile_points > 0).then(Vec::new),
        termination: Termination::FillingLimit,
    };
    if ocv0 <= cutoff {
        sol.termination = Termination::Immediate;
        return Ok(sol);
    }
    let push = |sol: &mut GalvanostaticSolution, c: f64, v: f64, p: &OverpotentialProfile| {
        sol.times.push(c - initial_filling);
        sol.mean_filling.push(c);
        sol.voltage.push(v);
        sol.lambda_history.push(p.lambda);
        if let Some(profiles) = sol.eta_profiles.as_mut() {
            profiles.push(p.samples(profile_points));
        }
    };
    let step = (c_max - initial_filling) / (points - 1) as f64;
    let mut prev_c = initial_filling;
    for i in 0..points {
        let c = if i == points - 1 { c_max } else { initial_filling + step * i as f64 };
        let v = cell.cell_voltage(c)?;
        if v < cutoff {
            if i == 0 {
                sol.termination = Termination::Immediate;
                return Ok(sol);
            }
            let c_cut = bisect(|x| cell.cell_voltage(x).unwrap_or(f64::NEG_INFINITY) - cutoff, prev_c, c, 1e-12)?;
            let profile = cell.profile(c_cut)?;
            push(&mut sol, c_cut, cutoff, &profile);
            sol.termination = Termination::Cutoff;
            return Ok(sol);
        }
        let profile = cell.profile(c)?;
        push(&mut sol, c, v, &profile);
        prev_c = c;
    }
    Ok(sol)
}
