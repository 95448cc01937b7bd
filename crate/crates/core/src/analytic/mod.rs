//! Closed-form solutions of the lean model and their first-order corrections.

mod corrections;
mod discharge;
mod impedance;
mod profile;
mod pulse;

pub use corrections::{
    hierarchical_wiring, polarization_correction, polarization_correction_with, validity_at, validity_bound, validity_over, HierarchicalSpec, HierarchicalWiring,
    PolarizationCorrection, ValidityReport,
};
pub use discharge::{simulate_discharge, GalvanostaticSolution, Termination};
pub use impedance::{arc_features, frequency_grid, ArcFeatures, ImpedanceModel, ImpedancePoint};
pub use profile::OverpotentialProfile;
pub use pulse::{pulse_current, CurrentTransient, PulseOptions};

use crate::kinetics::{KineticsSpec, OcpCurve};
use crate::scaling::DimensionlessGroups;
use crate::{Error, Result};

/// Everything the lean model needs at a fixed operating scale: the groups, kinetics
/// evaluated at reference electrolyte concentration, the OCP and the thermal voltage.
#[derive(Debug, Clone, Copy)]
pub struct LeanCell<'a> {
    pub groups: DimensionlessGroups,
    pub kinetics: &'a KineticsSpec,
    pub ocp: &'a OcpCurve,
    pub thermal_voltage: f64,
}

impl<'a> LeanCell<'a> {
    pub fn new(
        groups: DimensionlessGroups,
        kinetics: &'a KineticsSpec,
        ocp: &'a OcpCurve,
        thermal_voltage: f64,
    ) -> Self {
        LeanCell {
            groups,
            kinetics,
            ocp,
            thermal_voltage,
        }
    }

    pub fn with_groups(&self, groups: DimensionlessGroups) -> Self {
        LeanCell { groups, ..*self }
    }

    /// Linearization prefactor f(⟨c̃_s⟩, 1).
    pub fn prefactor(&self, mean_filling: f64) -> f64 {
        self.kinetics.linearize(mean_filling, 1.0)
    }

    /// OCP slope in thermal-voltage units per unit filling.
    pub fn ocp_slope(&self, mean_filling: f64) -> Result<f64> {
        Ok(self.ocp.ocp_slope(mean_filling)? / self.thermal_voltage)
    }

    pub fn profile(&self, mean_filling: f64) -> Result<OverpotentialProfile> {
        OverpotentialProfile::from_groups(&self.groups, self.prefactor(mean_filling))
    }

    /// Cell voltage vs Li/Li⁺ during galvanostatic discharge at mean filling `mean_filling`.
    pub fn cell_voltage(&self, mean_filling: f64) -> Result<f64> {
        let ocv = self.ocp.ocp(mean_filling)?;
        let profile = self.profile(mean_filling)?;
        Ok(ocv + self.thermal_voltage * profile_voltage(&profile, self.groups.electronic_share()))
    }
}

/// Voltage above the OCP, in thermal units, implied by an overpotential profile:
/// s·(η(1) − η′(0)) + (1 − s)·η(0) with s the electronic share of Da_w.
pub(crate) fn profile_voltage(profile: &OverpotentialProfile, share: f64) -> f64 {
    share * (profile.eta(1.0) - profile.slope(0.0)) + (1.0 - share) * profile.eta(0.0)
}

pub(crate) fn require_positive(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(name, format!("must be positive, got {value}")))
    }
}
