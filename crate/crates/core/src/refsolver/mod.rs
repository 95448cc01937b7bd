//! Finite-volume reference solvers used as numerical oracles for the closed forms.
//!
//! Both solvers use a uniform cell-centred grid, implicit Euler in time and Newton
//! iterations on a banded system with four unknowns per cell.

mod eis;
mod lean;
mod newton;
mod nonlinear;

pub use eis::{extract_impedance, EisOptions};
pub use lean::{solve_lean, LeanOptions, LeanSolution};
pub use nonlinear::{solve_nonlinear, NonlinearOptions, NonlinearSolution};

use crate::{Error, Result};

/// Uniform grid on the unit interval (or on the electrode thickness, scaled).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Grid1D {
    pub n_cells: usize,
}

impl Grid1D {
    pub fn new(n_cells: usize) -> Result<Self> {
        if n_cells < 8 {
            return Err(Error::invalid("n_cells", format!("need at least 8 cells, got {n_cells}")));
        }
        Ok(Grid1D { n_cells })
    }

    pub fn width(&self) -> f64 {
        1.0 / self.n_cells as f64
    }

    pub fn centers(&self) -> Vec<f64> {
        let h = self.width();
        (0..self.n_cells).map(|i| (i as f64 + 0.5) * h).collect()
    }
}

/// Spatial profiles at one instant. `delta_phi` is φ̃_s − φ̃_l.
#[derive(Debug, Clone, PartialEq)]
pub struct ElectrodeState {
    pub time: f64,
    pub c_s: Vec<f64>,
    pub c_l: Vec<f64>,
    pub eta: Vec<f64>,
    pub delta_phi: Vec<f64>,
}

/// Operating protocol. Currents are positive on discharge (lithiation).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Protocol {
    /// Constant current: scaled to the nominal rate for the lean solver, A/m² for the
    /// nonlinear solver.
    ConstantCurrent { current: f64 },
    /// Electrode potential held at `volts` vs Li/Li⁺.
    ConstantVoltage { volts: f64 },
    /// Electrode potential `offset + amplitude·sin(ω t)`, ω per unit solver time.
    Sinusoid { offset: f64, amplitude: f64, omega: f64 },
}

impl Protocol {
    pub(crate) fn voltage_at(&self, t: f64) -> Option<f64> {
        match *self {
            Protocol::ConstantCurrent { .. } => None,
            Protocol::ConstantVoltage { volts } => Some(volts),
            Protocol::Sinusoid { offset, amplitude, omega } => Some(offset + amplitude * (omega * t).sin()),
        }
    }
}

/// Root-mean-square difference of two curves over their common abscissa range.
///
/// Both curves are interpolated linearly onto the union of their abscissae inside the
/// overlap. Abscissae must be increasing.
pub fn rmse(a: &[(f64, f64)], b: &[(f64, f64)]) -> Result<f64> {
    if a.len() < 2 || b.len() < 2 {
        return Err(Error::invalid("curve", "need at least two points per curve"));
    }
    let lo = a[0].0.max(b[0].0);
    let hi = a[a.len() - 1].0.min(b[b.len() - 1].0);
    if !(hi > lo) {
        return Err(Error::DisjointRanges);
    }
    let mut xs: Vec<f64> = a
        .iter()
        .chain(b.iter())
        .map(|p| p.0)
        .filter(|&x| x >= lo && x <= hi)
        .chain([lo, hi])
        .collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    let sum: f64 = xs.iter().map(|&x| (interp(a, x) - interp(b, x)).powi(2)).sum();
    Ok((sum / xs.len() as f64).sqrt())
}

/// Linear interpolation on an increasing table, clamped at the ends.
pub fn interp(curve: &[(f64, f64)], x: f64) -> f64 {
    let k = curve.partition_point(|p| p.0 < x);
    if k == 0 {
        return curve[0].1;
    }
    if k == curve.len() {
        return curve[curve.len() - 1].1;
    }
    let (x0, y0) = curve[k - 1];
    let (x1, y1) = curve[k];
    if x1 == x0 {
        y1
    } else {
        y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    }
}
