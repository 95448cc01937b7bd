//! Lean porous electrode theory.
//!
//! Dimensionless scaling of porous battery electrodes, closed-form solutions of the
//! linearized ("lean") model for galvanostatic discharge, voltage pulses and impedance,
//! a finite-volume reference solver for the lean and the full nonlinear equations, and
//! parameter identification tools.
//!
//! ```
//! use lean_pet::{kinetics::KineticsSpec, scaling::{compute_groups, PhysicalCellParams}};
//!
//! let params = PhysicalCellParams::nmc532();
//! let kinetics = KineticsSpec::nmc532();
//! let groups = compute_groups(&params, 3600.0, kinetics.j0).unwrap();
//! assert!((groups.da_p - 22.6).abs() < 0.1);
//! ```

pub mod analytic;
pub mod config;
mod error;
pub mod inference;
pub mod kinetics;
pub mod numerics;
pub mod output;
pub mod protocols;
pub mod refsolver;
pub mod scaling;

pub use error::{Error, Result};

/// Faraday constant, C/mol.
pub const FARADAY: f64 = 96485.33212;
/// Molar gas constant, J/(mol K).
pub const GAS_CONSTANT: f64 = 8.314462618;
/// Boltzmann constant in eV/K.
pub const BOLTZMANN_EV: f64 = 8.617333262e-5;

/// Thermal voltage R_g T / F in volts.
pub fn thermal_voltage(temperature: f64) -> f64 {
    GAS_CONSTANT * temperature / FARADAY
}
