use super::{profile_voltage, LeanCell, OverpotentialProfile};
use crate::scaling::DimensionlessGroups;
use crate::{Error, Result};

/// Solid-solution validity check of the lean model.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidityReport {
    /// |Da_w / (f⁻²∂f/∂c̃_s + Da_p ∂Δφ̃_eq/∂c̃_s)|.
    pub ratio: f64,
    pub valid: bool,
    /// Da_w / (100·Da_p).
    pub coarse_ratio: f64,
    pub coarse_valid: bool,
    pub diagnostic: Option<String>,
}

/// `ocp_slope` is ∂Δφ̃_eq/∂c̃_s in thermal-voltage units and must be negative.
pub fn validity_bound(groups: &DimensionlessGroups, f: f64, df_dc: f64, ocp_slope: f64) -> Result<ValidityReport> {
    if !(ocp_slope < 0.0) {
        return Err(Error::invalid("ocp_slope", format!("solid-solution slope must be negative, got {ocp_slope}")));
    }
    let coarse_ratio = groups.da_w / (100.0 * groups.da_p);
    let denom = df_dc / (f * f) + groups.da_p * ocp_slope;
    let (ratio, diagnostic) = if groups.da_w == 0.0 {
        (0.0, None)
    } else if denom == 0.0 || !denom.is_finite() {
        (f64::INFINITY, Some(format!("validity denominator is {denom}")))
    } else {
        ((groups.da_w / denom).abs(), None)
    };
    Ok(ValidityReport {
        ratio,
        valid: ratio < 1.0,
        coarse_ratio,
        coarse_valid: coarse_ratio <= 1.0,
        diagnostic,
    })
}

/// Validity of a lean-model state at mean filling `c`.
pub fn validity_at(cell: &LeanCell, mean_filling: f64) -> Result<ValidityReport> {
    let f = cell.prefactor(mean_filling);
    let df_dc = cell.kinetics.filling_derivative(mean_filling, 1.0);
    validity_bound(&cell.groups, f, df_dc, cell.ocp_slope(mean_filling)?)
}

/// Least favourable validity report along a trajectory of mean fillings (largest ratio).
pub fn validity_over(cell: &LeanCell, fillings: &[f64]) -> Result<ValidityReport> {
    let mut worst: Option<ValidityReport> = None;
    for &c in fillings {
        let r = validity_at(cell, c)?;
        if worst.as_ref().map_or(true, |w| r.ratio > w.ratio) {
            worst = Some(r);
        }
    }
    worst.ok_or_else(|| Error::invalid("fillings", "empty trajectory"))
}

/// First-order correction for weak electrolyte polarization.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarizationCorrection {
    pub b: f64,
    pub a1: f64,
    pub a2: f64,
    /// Corrected overpotential profile.
    pub eta: OverpotentialProfile,
    /// Set when Da exceeds Da_w, outside the regime the correction assumes.
    pub regime_warning: bool,
    /// Corrected cell voltage, V.
    pub voltage: f64,
    deviation: OverpotentialProfile,
}

impl PolarizationCorrection {
    /// Electrolyte depletion δc̃_l(x̃), with c̃_l = 1 − δc̃_l.
    pub fn electrolyte_deviation(&self, x: f64) -> f64 {
        self.a1 + self.a2 * (x - 0.5) + self.deviation.eta(x)
    }

    pub fn electrolyte_deviation_slope(&self, x: f64) -> f64 {
        self.a2 + self.deviation.slope(x)
    }
}

/// Corrected overpotential, electrolyte deviation and voltage at mean filling
/// `mean_filling`, with α = (1/f)∂f/∂c̃_l at c̃_l = 1 taken from the kinetics.
pub fn polarization_correction(cell: &LeanCell, mean_filling: f64) -> Result<PolarizationCorrection> {
    let alpha = cell.kinetics.electrolyte_sensitivity(mean_filling);
    polarization_correction_with(cell, mean_filling, alpha)
}

pub fn polarization_correction_with(cell: &LeanCell, mean_filling: f64, alpha: f64) -> Result<PolarizationCorrection> {
    let g = &cell.groups;
    let f = cell.prefactor(mean_filling);
    if !(g.da_p * f > 0.0) {
        return Err(Error::invalid("f", "Da_p·f must be positive"));
    }
    let b = (g.da_w + alpha * g.da / (g.da_p * f)) * f;
    if !(b > 0.0) {
        return Err(Error::invalid("B", format!("must be positive, got {b}")));
    }
    let a1 = g.da / (g.da_p * b);
    let a2 = g.da_w_sigma * f * a1;
    let sqrt_b = b.sqrt();
    // (Da_w/Da)·[(A2 − A1B)cosh(√B(x−1)) − A2cosh(√Bx)]/(√B sinh√B), written without
    // dividing by Da so that Da → 0 is regular.
    let eta = OverpotentialProfile::new(sqrt_b, -g.da_w / (g.da_p * b), g.da_w * g.da_w_sigma * f / (g.da_p * b));
    let deviation = OverpotentialProfile::new(sqrt_b, -a1, a2);
    let voltage =
        cell.ocp.ocp(mean_filling)? + cell.thermal_voltage * profile_voltage(&eta, g.electronic_share());
    Ok(PolarizationCorrection {
        b,
        a1,
        a2,
        eta,
        regime_warning: g.da > g.da_w,
        voltage,
        deviation,
    })
}

/// Secondary-particle description of a hierarchical electrode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HierarchicalSpec {
    pub secondary_radius: f64,
    pub secondary_porosity: f64,
    pub secondary_specific_area: f64,
    pub da_sp: f64,
    pub da_w_sp: f64,
    pub da_p_sp: f64,
}

impl HierarchicalSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.secondary_porosity > 0.0 && self.secondary_porosity < 1.0) {
            return Err(Error::invalid("secondary_porosity", "must lie in (0, 1)"));
        }
        for (name, v) in [("da_sp", self.da_sp), ("da_w_sp", self.da_w_sp), ("da_p_sp", self.da_p_sp)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::invalid(name, format!("must be non-negative, got {v}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HierarchicalWiring {
    /// Effective wiring prefactor Da′_w.
    pub da_w_prime: f64,
    /// Da′_w·f, the effective rate that replaces Da_w·f in Λ².
    pub effective_rate: f64,
}

/// Da′_w = (3/f)(Da_w/Da_w^sp)(x coth x − 1), x = √(Da_w^sp f).
pub fn hierarchical_wiring(spec: &HierarchicalSpec, da_w: f64, f: f64) -> Result<HierarchicalWiring> {
    spec.validate()?;
    if !(f > 0.0 && f.is_finite()) {
        return Err(Error::invalid("f", format!("must be positive, got {f}")));
    }
    let x2 = spec.da_w_sp * f;
    let da_w_prime = if x2 < 1e-4 {
        da_w * (1.0 - x2 / 15.0 + 2.0 * x2 * x2 / 315.0)
    } else {
        let x = x2.sqrt();
        3.0 / f * (da_w / spec.da_w_sp) * (x / x.tanh() - 1.0)
    };
    Ok(HierarchicalWiring {
        da_w_prime,
        effective_rate: da_w_prime * f,
    })
}
