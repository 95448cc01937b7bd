use super::newton::{newton, DiscreteSystem, NewtonSettings, VARS};
use super::{ElectrodeState, Grid1D, Protocol};
use crate::analytic::LeanCell;
use crate::numerics::BandMatrix;
use crate::{Error, Result};

/// Floor applied to wiring groups so the potential equations stay well posed when a
/// conduction path is ideal.
const WIRING_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeanOptions {
    pub grid: Grid1D,
    /// Dimensionless time step.
    pub dt: f64,
    /// Dimensionless end time.
    pub t_end: f64,
    /// Let the kinetic prefactor follow the local electrolyte concentration.
    pub electrolyte_coupling: bool,
    /// Keep the τ̃_l accumulation term in the electrolyte balance.
    pub transient_electrolyte: bool,
    /// Keep the double-layer term Da_c⁻¹ ∂Δφ̃/∂t̃.
    pub capacitance: bool,
    /// Stop once the voltage drops below this value (V).
    pub cutoff: Option<f64>,
    pub record_states: bool,
}

impl LeanOptions {
    pub fn new(grid: Grid1D, dt: f64, t_end: f64) -> Self {
        LeanOptions {
            grid,
            dt,
            t_end,
            electrolyte_coupling: true,
            transient_electrolyte: true,
            capacitance: true,
            cutoff: None,
            record_states: false,
        }
    }
}

/// Time series from the lean solver. `current` is the scaled current Da_p∫j̃ dx̃.
#[derive(Debug, Clone, PartialEq)]
pub struct LeanSolution {
    pub times: Vec<f64>,
    pub voltage: Vec<f64>,
    pub current: Vec<f64>,
    pub mean_filling: Vec<f64>,
    /// |Da_p ∫ j̃_F dx̃ − applied current| per accepted step (constant-current runs).
    pub constraint_residual: Vec<f64>,
    pub states: Vec<ElectrodeState>,
}

impl LeanSolution {
    pub fn curve(&self) -> Vec<(f64, f64)> {
        self.mean_filling.iter().copied().zip(self.voltage.iter().copied()).collect()
    }
}

struct LeanSystem<'a> {
    cell: &'a LeanCell<'a>,
    opts: &'a LeanOptions,
    h: f64,
    dt: f64,
    old: &'a [f64],
    mean_filling: f64,
    ocv: f64,
    current: Option<f64>,
    voltage: Option<f64>,
    sigma: f64,
    kappa: f64,
}

impl LeanSystem<'_> {
    fn prefactor(&self, c_l: f64) -> (f64, f64) {
        let k = self.cell.kinetics;
        if self.opts.electrolyte_coupling {
            let cl = c_l.max(1e-12);
            (k.linearize(self.mean_filling, cl), k.electrolyte_derivative(self.mean_filling, cl))
        } else {
            (k.linearize(self.mean_filling, 1.0), 0.0)
        }
    }

    /// Electrolyte accumulation coefficient. Dropping τ̃_l leaves the salt level
    /// undetermined, so a tiny floor keeps total salt conserved instead.
    fn accumulation(&self) -> f64 {
        let tau = if self.opts.transient_electrolyte { self.cell.groups.tau_l } else { 0.0 };
        tau.max(1e-10)
    }

    fn capacitive(&self) -> f64 {
        if self.opts.capacitance && self.cell.groups.da_c > 0.0 {
            1.0 / (self.cell.groups.da_c * self.dt)
        } else {
            0.0
        }
    }

    /// Faradaic and total dimensionless current in cell `i`.
    fn currents(&self, x: &[f64], i: usize) -> (f64, f64) {
        let (cl, ps, pl) = (x[i * VARS + 1], x[i * VARS + 2], x[i * VARS + 3]);
        let (f, _) = self.prefactor(cl);
        let jf = -f * (ps - pl - self.ocv);
        let dphi_old = self.old[i * VARS + 2] - self.old[i * VARS + 3];
        (jf, jf - self.capacitive() * ((ps - pl) - dphi_old))
    }

    fn collector_gradient(&self, x: &[f64]) -> f64 {
        let n = x.len() / VARS;
        match (self.current, self.voltage) {
            (Some(i), _) => -i / (self.cell.groups.da_p * self.sigma),
            (None, Some(v)) => {
                let vb = v / self.cell.thermal_voltage;
                (8.0 * vb - 9.0 * x[(n - 1) * VARS + 2] + x[(n - 2) * VARS + 2]) / (3.0 * self.h)
            }
            (None, None) => unreachable!("protocol sets current or voltage"),
        }
    }

    fn collector_potential(&self, x: &[f64]) -> f64 {
        let n = x.len() / VARS;
        let g = self.collector_gradient(x);
        (3.0 * self.h * g + 9.0 * x[(n - 1) * VARS + 2] - x[(n - 2) * VARS + 2]) / 8.0
    }
}

impl DiscreteSystem for LeanSystem<'_> {
    fn residual(&self, x: &[f64], r: &mut [f64]) {
        let g = &self.cell.groups;
        let n = x.len() / VARS;
        let h = self.h;
        let tau = self.accumulation();
        let separator_slope = (9.0 * x[3] - x[VARS + 3]) / (3.0 * h);
        let collector_slope = self.collector_gradient(x);
        for i in 0..n {
            let o = i * VARS;
            let (jf, jt) = self.currents(x, i);
            let face = |k: usize, v: usize| (x[k * VARS + v] - x[(k - 1) * VARS + v]) / h;
            let (cl_l, ps_l, pl_l) = if i == 0 {
                (g.da * self.kappa * separator_slope, 0.0, separator_slope)
            } else {
                (face(i, 1), face(i, 2), face(i, 3))
            };
            let (cl_r, ps_r, pl_r) = if i == n - 1 {
                (0.0, collector_slope, 0.0)
            } else {
                (face(i + 1, 1), face(i + 1, 2), face(i + 1, 3))
            };
            r[o] = (x[o] - self.old[o]) / self.dt - g.da_p * jf;
            r[o + 1] = tau * h * (x[o + 1] - self.old[o + 1]) / self.dt - (cl_r - cl_l) + h * g.da * jt;
            r[o + 2] = self.sigma * (ps_r - ps_l) + h * jt;
            r[o + 3] = self.kappa * (pl_r - pl_l) - h * jt;
        }
    }

    fn jacobian(&self, x: &[f64], _r0: &[f64], jac: &mut BandMatrix) {
        let g = &self.cell.groups;
        let n = x.len() / VARS;
        let h = self.h;
        let tau = self.accumulation();
        let cap = self.capacitive();
        jac.clear();
        for i in 0..n {
            let o = i * VARS;
            let (cl, ps, pl) = (x[o + 1], x[o + 2], x[o + 3]);
            let (f, f_cl) = self.prefactor(cl);
            let eta = ps - pl - self.ocv;
            // ∂j̃_F and ∂J̃ with respect to (c̃_l, φ̃_s, φ̃_l).
            let djf = [-f_cl * eta, -f, f];
            let djt = [djf[0], djf[1] - cap, djf[2] + cap];
            for (k, v) in [1, 2, 3].into_iter().enumerate() {
                jac.add(o, o + v, -g.da_p * djf[k]);
                jac.add(o + 1, o + v, h * g.da * djt[k]);
                jac.add(o + 2, o + v, h * djt[k]);
                jac.add(o + 3, o + v, -h * djt[k]);
            }
            jac.add(o, o, 1.0 / self.dt);
            jac.add(o + 1, o + 1, tau * h / self.dt);
            // Interior faces: (v, coefficient) for c̃_l, φ̃_s, φ̃_l rows.
            for (v, coef) in [(1, 1.0), (2, self.sigma), (3, self.kappa)] {
                let sign = if v == 1 { -1.0 } else { 1.0 };
                if i + 1 < n {
                    jac.add(o + v, o + VARS + v, sign * coef / h);
                    jac.add(o + v, o + v, -sign * coef / h);
                }
                if i > 0 {
                    jac.add(o + v, o + v, -sign * coef / h);
                    jac.add(o + v, o - VARS + v, sign * coef / h);
                }
            }
        }
        // Separator face: φ̃_l(0) = 0 through a one-sided quadratic stencil; the salt
        // influx follows the ionic current.
        let s0 = 9.0 / (3.0 * h);
        let s1 = -1.0 / (3.0 * h);
        jac.add(1, 3, g.da * self.kappa * s0);
        jac.add(1, VARS + 3, g.da * self.kappa * s1);
        jac.add(3, 3, -self.kappa * s0);
        jac.add(3, VARS + 3, -self.kappa * s1);
        if self.current.is_none() {
            let last = (n - 1) * VARS;
            jac.add(last + 2, last + 2, -self.sigma * 9.0 / (3.0 * h));
            jac.add(last + 2, last - VARS + 2, self.sigma / (3.0 * h));
        }
    }
}

/// Solves the lean equations from a uniform rest state at `initial_filling`.
///
/// Time is scaled by t_p and currents by the nominal rate, so a constant current of 1
/// advances the mean filling by exactly t̃.
pub fn solve_lean(cell: &LeanCell, protocol: Protocol, initial_filling: f64, options: &LeanOptions) -> Result<LeanSolution> {
    if !(options.dt > 0.0 && options.t_end > 0.0) {
        return Err(Error::invalid("dt", "time step and end time must be positive"));
    }
    let g = &cell.groups;
    if !(g.da_p > 0.0) {
        return Err(Error::invalid("da_p", "must be positive"));
    }
    let n = options.grid.n_cells;
    let h = options.grid.width();
    let vt = cell.thermal_voltage;
    let ocv0 = cell.ocp.ocp(initial_filling)? / vt;
    let (_, c_top) = cell.ocp.range();
    let mut x = vec![0.0; n * VARS];
    for i in 0..n {
        x[i * VARS] = initial_filling;
        x[i * VARS + 1] = 1.0;
        x[i * VARS + 2] = ocv0;
    }
    let mut sol = LeanSolution {
        times: Vec::new(),
        voltage: Vec::new(),
        current: Vec::new(),
        mean_filling: Vec::new(),
        constraint_residual: Vec::new(),
        states: Vec::new(),
    };
    let settings = NewtonSettings {
        max_iterations: 50,
        tolerance: 1e-11,
    };
    let mut t = 0.0;
    let mut dt = options.dt;
    let dt_min = options.dt * 1e-6;
    while t < options.t_end * (1.0 - 1e-12) {
        let step = dt.min(options.t_end - t);
        let t_new = t + step;
        let (current, voltage) = match protocol {
            Protocol::ConstantCurrent { current } => (Some(current), None),
            p => (None, p.voltage_at(t_new)),
        };
        let old = x.clone();
        let mut trial = x.clone();
        if let Some(i) = current {
            for k in 0..n {
                trial[k * VARS] += step * i;
            }
        }
        let mut mean = mean_of(&trial, n);
        let mut outcome = Ok(());
        for _ in 0..30 {
            if !(mean > 0.0 && mean < 1.0) {
                outcome = Err(Error::numerical("lean solver", "mean filling left (0, 1)"));
                break;
            }
            let system = LeanSystem {
                cell,
                opts: options,
                h,
                dt: step,
                old: &old,
                mean_filling: mean,
                ocv: cell.ocp.eval_unchecked(mean).0 / vt,
                current,
                voltage,
                sigma: 1.0 / g.da_w_sigma.max(WIRING_FLOOR),
                kappa: 1.0 / g.da_w_kappa.max(WIRING_FLOOR),
            };
            if let Err(e) = newton(&system, &mut trial, settings) {
                outcome = Err(e);
                break;
            }
            let updated = mean_of(&trial, n);
            let change = (updated - mean).abs();
            mean = updated;
            if change < 1e-14 {
                break;
            }
        }
        if let Err(e) = outcome {
            dt = step * 0.5;
            if dt < dt_min {
                return Err(Error::numerical("lean solver", format!("step size underflow at t = {t}: {e}")));
            }
            continue;
        }
        if trial.chunks(VARS).any(|c| !(c[1] > 0.0)) {
            dt = step * 0.5;
            if dt < dt_min {
                return Err(Error::numerical("lean solver", format!("electrolyte depleted at t = {t}")));
            }
            continue;
        }
        x = trial;
        t = t_new;
        dt = options.dt;

        let system = LeanSystem {
            cell,
            opts: options,
            h,
            dt: step,
            old: &old,
            mean_filling: mean,
            ocv: cell.ocp.eval_unchecked(mean).0 / vt,
            current,
            voltage,
            sigma: 1.0 / g.da_w_sigma.max(WIRING_FLOOR),
            kappa: 1.0 / g.da_w_kappa.max(WIRING_FLOOR),
        };
        let applied = -g.da_p * system.sigma * system.collector_gradient(&x);
        let faradaic: f64 = (0..n).map(|i| system.currents(&x, i).0).sum::<f64>() * h * g.da_p;
        let volts = vt * system.collector_potential(&x);
        sol.times.push(t);
        sol.voltage.push(volts);
        sol.current.push(applied);
        sol.mean_filling.push(mean);
        sol.constraint_residual.push((faradaic - applied).abs());
        if options.record_states {
            sol.states.push(ElectrodeState {
                time: t,
                c_s: x.chunks(VARS).map(|c| c[0]).collect(),
                c_l: x.chunks(VARS).map(|c| c[1]).collect(),
                eta: x.chunks(VARS).map(|c| c[2] - c[3] - system.ocv).collect(),
                delta_phi: x.chunks(VARS).map(|c| c[2] - c[3]).collect(),
            });
        }
        if options.cutoff.is_some_and(|v| volts < v) || mean >= c_top {
            break;
        }
    }
    Ok(sol)
}

fn mean_of(x: &[f64], n: usize) -> f64 {
    x.chunks(VARS).map(|c| c[0]).sum::<f64>() / n as f64
}
