use super::newton::{newton, DiscreteSystem, NewtonSettings, VARS};
use super::{ElectrodeState, Grid1D, Protocol};
use crate::analytic::Termination;
use crate::kinetics::{KineticsSpec, OcpCurve};
use crate::scaling::PhysicalCellParams;
use crate::{Error, Result, FARADAY};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NonlinearOptions {
    pub grid: Grid1D,
    /// First time step, s.
    pub dt: f64,
    pub dt_max: f64,
    /// End time, s.
    pub t_end: f64,
    /// Keep the step size fixed at `dt` (used for periodic forcing).
    pub fixed_step: bool,
    /// Largest change of mean filling per step.
    pub max_filling_step: f64,
    /// Largest voltage change per step, V.
    pub max_voltage_step: f64,
    pub cutoff: Option<f64>,
    pub record_states: bool,
}

impl NonlinearOptions {
    pub fn new(grid: Grid1D, dt: f64, t_end: f64) -> Self {
        NonlinearOptions {
            grid,
            dt,
            dt_max: f64::INFINITY,
            t_end,
            fixed_step: false,
            max_filling_step: 0.004,
            max_voltage_step: 0.01,
            cutoff: None,
            record_states: false,
        }
    }
}

/// Dimensional time series: seconds, volts, A/m² (positive on discharge).
#[derive(Debug, Clone, PartialEq)]
pub struct NonlinearSolution {
    pub times: Vec<f64>,
    pub voltage: Vec<f64>,
    pub current: Vec<f64>,
    pub mean_filling: Vec<f64>,
    pub states: Vec<ElectrodeState>,
    pub termination: Termination,
}

impl NonlinearSolution {
    pub fn curve(&self) -> Vec<(f64, f64)> {
        self.mean_filling.iter().copied().zip(self.voltage.iter().copied()).collect()
    }
}

/// Precomputed coefficients of the dimensional model.
struct Coefficients<'a> {
    params: &'a PhysicalCellParams,
    kinetics: &'a KineticsSpec,
    ocp: &'a OcpCurve,
    vt: f64,
    area: f64,
    solid_capacity: f64,
    beta: f64,
    separator_resistance: f64,
}

impl<'a> Coefficients<'a> {
    fn new(params: &'a PhysicalCellParams, kinetics: &'a KineticsSpec, ocp: &'a OcpCurve) -> Self {
        Coefficients {
            params,
            kinetics,
            ocp,
            vt: params.thermal_voltage(),
            area: params.specific_area(),
            solid_capacity: params.active_volume_fraction() * FARADAY * params.max_solid_concentration,
            beta: 2.0 * (1.0 - params.transference_number),
            separator_resistance: params.separator_thickness
                / params.ionic_conductivity.value(params.electrolyte_concentration),
        }
    }

    fn kappa(&self, c_l: f64) -> f64 {
        self.params.effective_ionic_conductivity(c_l * self.params.electrolyte_concentration)
    }

    fn diffusivity(&self, c_l: f64) -> f64 {
        self.params.effective_diffusivity(c_l * self.params.electrolyte_concentration)
    }
}

struct NonlinearSystem<'a> {
    k: &'a Coefficients<'a>,
    h: f64,
    dt: f64,
    old: &'a [f64],
    current: Option<f64>,
    voltage: Option<f64>,
}

impl NonlinearSystem<'_> {
    /// Faradaic and total interfacial current density in cell `i`, A/m².
    fn currents(&self, x: &[f64], i: usize) -> (f64, f64) {
        let o = i * VARS;
        let (cs, cl, ps, pl) = (x[o], x[o + 1], x[o + 2], x[o + 3]);
        let k = self.k;
        let eta = ps - pl - k.ocp.eval_unchecked(cs).0 / k.vt;
        let jf = k.kinetics.j0 * k.kinetics.current_density(cs, cl, eta);
        let dphi_old = self.old[o + 2] - self.old[o + 3];
        let jt = jf - k.params.double_layer_capacitance * k.vt * ((ps - pl) - dphi_old) / self.dt;
        (jf, jt)
    }

    /// −(ionic current) entering at the separator, from φ_l(0) = −i_l R_sep and the salt
    /// flux (1 − t₊)i_l/F set by the same current.
    fn separator_flux(&self, x: &[f64]) -> f64 {
        let k = self.k;
        let cl = x[1].max(1e-12);
        let kappa = k.kappa(cl);
        let q = (1.0 - k.params.transference_number)
            / (FARADAY * k.diffusivity(cl) * k.params.electrolyte_concentration * cl);
        let d0 = (9.0 * x[3] - x[VARS + 3]) / (3.0 * self.h);
        kappa * k.vt * d0 / (1.0 + kappa * k.vt * k.beta * q + 8.0 * kappa * k.separator_resistance / (3.0 * self.h))
    }

    fn collector_gradient(&self, x: &[f64]) -> f64 {
        let n = x.len() / VARS;
        let sigma = self.k.params.solid_conductivity;
        match (self.current, self.voltage) {
            (Some(i), _) => -i / (sigma * self.k.vt),
            (None, Some(v)) => {
                (8.0 * v / self.k.vt - 9.0 * x[(n - 1) * VARS + 2] + x[(n - 2) * VARS + 2]) / (3.0 * self.h)
            }
            (None, None) => unreachable!("protocol sets current or voltage"),
        }
    }

    fn collector_potential(&self, x: &[f64]) -> f64 {
        let n = x.len() / VARS;
        let g = self.collector_gradient(x);
        self.k.vt * (3.0 * self.h * g + 9.0 * x[(n - 1) * VARS + 2] - x[(n - 2) * VARS + 2]) / 8.0
    }

    fn applied_current(&self, x: &[f64]) -> f64 {
        -self.k.params.solid_conductivity * self.k.vt * self.collector_gradient(x)
    }
}

impl DiscreteSystem for NonlinearSystem<'_> {
    fn residual(&self, x: &[f64], r: &mut [f64]) {
        let k = self.k;
        let p = k.params;
        let n = x.len() / VARS;
        let h = self.h;
        let salt = (1.0 - p.transference_number) / (FARADAY * p.electrolyte_concentration);
        let sigma_vt = p.solid_conductivity * k.vt;
        let sep = self.separator_flux(x);
        let collector = self.collector_gradient(x);
        // Face fluxes between cells i−1 and i: (D c̃′, φ̃_s′, ionic K).
        let face = |i: usize| {
            let (a, b) = ((i - 1) * VARS, i * VARS);
            let cl_face = 0.5 * (x[a + 1] + x[b + 1]);
            let d = k.diffusivity(cl_face) * (x[b + 1] - x[a + 1]) / h;
            let ps = (x[b + 2] - x[a + 2]) / h;
            let ln_ratio = (x[b + 1].max(1e-12) / x[a + 1].max(1e-12)).ln();
            let kk = k.kappa(cl_face) * k.vt * ((x[b + 3] - x[a + 3]) - k.beta * ln_ratio) / h;
            (d, ps, kk)
        };
        let mut left = (salt * sep, 0.0, sep);
        for i in 0..n {
            let o = i * VARS;
            let right = if i == n - 1 { (0.0, collector, 0.0) } else { face(i + 1) };
            let (jf, jt) = self.currents(x, i);
            r[o] = (x[o] - self.old[o]) - self.dt * k.area * jf / k.solid_capacity;
            r[o + 1] = p.porosity * h * (x[o + 1] - self.old[o + 1]) / self.dt - (right.0 - left.0)
                + h * salt * k.area * jt;
            r[o + 2] = sigma_vt * (right.1 - left.1) + h * k.area * jt;
            r[o + 3] = (right.2 - left.2) - h * k.area * jt;
            left = right;
        }
    }

    fn limit_step(&self, x: &[f64], dx: &mut [f64]) {
        for (xc, dc) in x.chunks(VARS).zip(dx.chunks_mut(VARS)) {
            let cs_new = xc[0] + dc[0];
            if cs_new <= 1e-9 {
                dc[0] = 0.5 * (1e-9 - xc[0]).max(-xc[0]);
            } else if cs_new >= 1.0 - 1e-9 {
                dc[0] = 0.5 * (1.0 - xc[0]);
            }
            if xc[1] + dc[1] < 0.2 * xc[1] {
                dc[1] = -0.8 * xc[1];
            }
            for v in 2..VARS {
                dc[v] = dc[v].clamp(-10.0, 10.0);
            }
        }
    }
}

/// Solves the reaction-limited porous electrode model with nonlinear kinetics and a
/// transient, concentration-dependent electrolyte, starting from rest at
/// `initial_filling`.
pub fn solve_nonlinear(
    params: &PhysicalCellParams,
    kinetics: &KineticsSpec,
    ocp: &OcpCurve,
    protocol: Protocol,
    initial_filling: f64,
    options: &NonlinearOptions,
) -> Result<NonlinearSolution> {
    params.validate()?;
    kinetics.validate()?;
    if !(options.dt > 0.0 && options.t_end > 0.0) {
        return Err(Error::invalid("dt", "time step and end time must be positive"));
    }
    let coeffs = Coefficients::new(params, kinetics, ocp);
    let vt = coeffs.vt;
    let n = options.grid.n_cells;
    let h = params.electrode_thickness * options.grid.width();
    let (c_lo, c_hi) = ocp.range();
    let ocv0 = ocp.ocp(initial_filling)?;
    let mut x = vec![0.0; n * VARS];
    for i in 0..n {
        x[i * VARS] = initial_filling;
        x[i * VARS + 1] = 1.0;
        x[i * VARS + 2] = ocv0 / vt;
    }
    let mut sol = NonlinearSolution {
        times: vec![0.0],
        voltage: vec![protocol.voltage_at(0.0).unwrap_or(ocv0)],
        current: vec![0.0],
        mean_filling: vec![initial_filling],
        states: Vec::new(),
        termination: Termination::FillingLimit,
    };
    if let Protocol::ConstantCurrent { current } = protocol {
        sol.current[0] = current;
    }
    let settings = NewtonSettings {
        max_iterations: 50,
        tolerance: 1e-9,
    };
    let dt_min = options.dt * 1e-8;
    let mut t = 0.0;
    let mut dt = options.dt;
    let mut last_v = sol.voltage[0];
    let mut last_mean = initial_filling;
    while t < options.t_end * (1.0 - 1e-12) {
        let step = dt.min(options.t_end - t);
        let t_new = t + step;
        let (current, voltage) = match protocol {
            Protocol::ConstantCurrent { current } => (Some(current), None),
            p => (None, p.voltage_at(t_new)),
        };
        let mut trial = x.clone();
        if let Some(i) = current {
            let rate = step * i / (coeffs.solid_capacity * params.electrode_thickness);
            trial.chunks_mut(VARS).for_each(|c| c[0] += rate);
        }
        let system = NonlinearSystem {
            k: &coeffs,
            h,
            dt: step,
            old: &x,
            current,
            voltage,
        };
        let solved = newton(&system, &mut trial, settings);
        let admissible = trial.chunks(VARS).all(|c| c[1] > 0.0 && c[0] > 0.0 && c[0] < 1.0);
        if solved.is_err() || !admissible {
            if options.fixed_step {
                return Err(Error::numerical(
                    "nonlinear solver",
                    format!("step failed at t = {t:.6e} s: {}", solved.err().map_or("inadmissible state".into(), |e| e.to_string())),
                ));
            }
            dt = step * 0.5;
            if dt < dt_min {
                return Err(Error::numerical("nonlinear solver", format!("step size underflow at t = {t:.6e} s")));
            }
            continue;
        }
        let volts = voltage.unwrap_or_else(|| system.collector_potential(&trial));
        let amps = current.unwrap_or_else(|| system.applied_current(&trial));
        let mean = trial.chunks(VARS).map(|c| c[0]).sum::<f64>() / n as f64;
        if !options.fixed_step {
            let dv = (volts - last_v).abs() / options.max_voltage_step;
            let dc = (mean - last_mean).abs() / options.max_filling_step;
            let ratio = dv.max(dc);
            if ratio > 2.0 && step > dt_min * 16.0 {
                dt = step / ratio;
                continue;
            }
            dt = (step * (0.9 / ratio.max(1e-3)).clamp(0.2, 1.5)).min(options.dt_max);
        }
        let out_of_table = trial.chunks(VARS).any(|c| c[0] < c_lo || c[0] > c_hi);
        if let Some(cut) = options.cutoff {
            if volts < cut {
                let w = (last_v - cut) / (last_v - volts);
                sol.times.push(t + w * step);
                sol.voltage.push(cut);
                sol.current.push(amps);
                sol.mean_filling.push(last_mean + w * (mean - last_mean));
                sol.termination = Termination::Cutoff;
                return Ok(sol);
            }
        }
        if out_of_table {
            sol.termination = Termination::FillingLimit;
            return Ok(sol);
        }
        x = trial;
        t = t_new;
        last_v = volts;
        last_mean = mean;
        sol.times.push(t);
        sol.voltage.push(volts);
        sol.current.push(amps);
        sol.mean_filling.push(mean);
        if options.record_states {
            sol.states.push(ElectrodeState {
                time: t,
                c_s: x.chunks(VARS).map(|c| c[0]).collect(),
                c_l: x.chunks(VARS).map(|c| c[1]).collect(),
                eta: x
                    .chunks(VARS)
                    .map(|c| c[2] - c[3] - ocp.eval_unchecked(c[0]).0 / vt)
                    .collect(),
                delta_phi: x.chunks(VARS).map(|c| c[2] - c[3]).collect(),
            });
        }
    }
    sol.termination = Termination::EndTime;
    Ok(sol)
}
