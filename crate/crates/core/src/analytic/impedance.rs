use num_complex::Complex64;

use super::require_positive;
use crate::kinetics::{KineticsSpec, OcpCurve};
use crate::numerics::logspace;
use crate::scaling::{compute_small_signal_groups, DimensionlessGroups, PhysicalCellParams};
use crate::{Error, Result};

/// One point of an area-normalized impedance spectrum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImpedancePoint {
    /// Angular frequency, rad/s.
    pub omega: f64,
    /// Impedance, Ω·m².
    pub z: Complex64,
}

impl ImpedancePoint {
    pub fn frequency_hz(&self) -> f64 {
        self.omega / std::f64::consts::TAU
    }

    pub fn phase_degrees(&self) -> f64 {
        self.z.arg().to_degrees()
    }
}

/// Small-signal impedance of the lean electrode about a rest state.
///
/// Groups must be evaluated with t_p = 1 s so that the dimensionless frequency equals
/// ω in rad/s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImpedanceModel {
    pub groups: DimensionlessGroups,
    pub f: f64,
    /// ∂Δφ̃_eq/∂c̃_s in thermal-voltage units.
    pub ocp_slope: f64,
    /// Wiring resistance scale Da_w·φ_T/(L j0 a_p), Ω·m².
    pub z_ref: f64,
    /// Ohmic resistance in series with the electrode (separator), Ω·m².
    pub series_resistance: f64,
}

impl ImpedanceModel {
    /// Impedance model about rest at filling `filling`.
    pub fn at_rest(params: &PhysicalCellParams, kinetics: &KineticsSpec, ocp: &OcpCurve, filling: f64) -> Result<Self> {
        let groups = compute_small_signal_groups(params, kinetics.j0)?;
        let vt = params.thermal_voltage();
        let z_ref = groups.da_w * vt / (params.electrode_thickness * kinetics.j0 * params.specific_area());
        Ok(ImpedanceModel {
            groups,
            f: kinetics.linearize(filling, 1.0),
            ocp_slope: ocp.ocp_slope(filling)? / vt,
            z_ref,
            series_resistance: params.separator_thickness / params.ionic_conductivity.value(params.electrolyte_concentration),
        })
    }

    /// Dimensionless complex wavenumber squared Ω² = Da_w(f/D + iω/Da_c) with
    /// D = 1 − Δφ̃_eq′·Da_p·f/(iω).
    pub fn wavenumber_squared(&self, omega: f64) -> Complex64 {
        let g = &self.groups;
        let iw = Complex64::new(0.0, omega);
        let chemical = Complex64::new(1.0, 0.0) - self.ocp_slope * g.da_p * self.f / iw;
        g.da_w * (self.f / chemical + iw / g.da_c)
    }

    /// Electrode impedance alone, without the series resistance.
    pub fn electrode(&self, omega: f64) -> Result<Complex64> {
        Ok(self.transfer(omega)? - self.series_resistance)
    }

    /// Impedance at any nonzero real ω, including negative frequencies.
    pub fn transfer(&self, omega: f64) -> Result<Complex64> {
        let s = self.groups.electronic_share();
        let omega2 = self.wavenumber_squared(omega);
        if omega2.norm() == 0.0 || !omega2.is_finite() {
            return Err(Error::numerical("impedance", format!("degenerate wavenumber at ω = {omega}")));
        }
        let (coth_ratio, csch_ratio) = hyperbolic_ratios(omega2);
        let g = s * (1.0 - s) * (1.0 + 2.0 * csch_ratio) + (s * s + (1.0 - s) * (1.0 - s)) * coth_ratio;
        Ok(self.z_ref * g + self.series_resistance)
    }

    pub fn spectrum(&self, omegas: &[f64]) -> Result<Vec<ImpedancePoint>> {
        omegas
            .iter()
            .map(|&omega| {
                require_positive("omega", omega)?;
                Ok(ImpedancePoint {
                    omega,
                    z: self.transfer(omega)?,
                })
            })
            .collect()
    }
}

/// (coth Ω/Ω, 1/(Ω sinh Ω)) as functions of Ω², stable for small and large |Ω|.
fn hyperbolic_ratios(omega2: Complex64) -> (Complex64, Complex64) {
    if omega2.norm() < 1e-6 {
        let inv = 1.0 / omega2;
        return (inv + 1.0 / 3.0 - omega2 / 45.0, inv - 1.0 / 6.0 + 7.0 * omega2 / 360.0);
    }
    let omega = omega2.sqrt();
    let e2 = (-2.0 * omega).exp();
    let e1 = (-omega).exp();
    let denom = Complex64::new(1.0, 0.0) - e2;
    ((1.0 + e2) / denom / omega, 2.0 * e1 / denom / omega)
}

/// Logarithmic frequency grid in Hz with `per_decade` points per decade (inclusive).
pub fn frequency_grid(min_hz: f64, max_hz: f64, per_decade: usize) -> Vec<f64> {
    let decades = (max_hz / min_hz).log10();
    let n = (decades * per_decade as f64).round() as usize + 1;
    logspace(min_hz, max_hz, n.max(2))
}

/// Geometry of the highest-frequency (charge-transfer) arc of a Nyquist plot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArcFeatures {
    /// Frequency of the arc apex (largest −Im Z), Hz.
    pub apex_hz: f64,
    /// Re Z at the highest sampled frequency.
    pub high_intercept: f64,
    /// Re Z at the minimum of −Im Z on the low-frequency side of the apex.
    pub low_intercept: f64,
}

impl ArcFeatures {
    pub fn diameter(&self) -> f64 {
        self.low_intercept - self.high_intercept
    }
}

/// Locates the charge-transfer arc in a spectrum sorted by increasing frequency.
/// Returns `None` when no interior local maximum of −Im Z exists.
pub fn arc_features(points: &[ImpedancePoint]) -> Option<ArcFeatures> {
    let n = points.len();
    if n < 3 {
        return None;
    }
    let neg_im = |k: usize| -points[k].z.im;
    let apex = (1..n - 1).rev().find(|&k| neg_im(k) >= neg_im(k - 1) && neg_im(k) > neg_im(k + 1))?;
    let mut foot = apex;
    while foot > 0 && neg_im(foot - 1) < neg_im(foot) {
        foot -= 1;
    }
    Some(ArcFeatures {
        apex_hz: points[apex].frequency_hz(),
        high_intercept: points[n - 1].z.re,
        low_intercept: points[foot].z.re,
    })
}
