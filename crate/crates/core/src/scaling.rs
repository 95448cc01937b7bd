//! Dimensional cell parameters and the dimensionless groups of the lean model.

use crate::{Error, Result, FARADAY, GAS_CONSTANT};

/// A transport property that is either constant or tabulated against electrolyte
/// concentration (mol/m³). Tables are interpolated linearly and held flat outside
/// their range.
#[derive(Debug, Clone, PartialEq)]
pub enum Property {
    Constant(f64),
    Table(Vec<(f64, f64)>),
}

impl Property {
    pub fn value(&self, concentration: f64) -> f64 {
        match self {
            Property::Constant(v) => *v,
            Property::Table(points) => {
                let (first, last) = (points[0], points[points.len() - 1]);
                if concentration <= first.0 {
                    return first.1;
                }
                if concentration >= last.0 {
                    return last.1;
                }
                let k = points.partition_point(|p| p.0 <= concentration);
                let (x0, y0) = points[k - 1];
                let (x1, y1) = points[k];
                y0 + (y1 - y0) * (concentration - x0) / (x1 - x0)
            }
        }
    }

    fn validate(&self, name: &'static str) -> Result<()> {
        match self {
            Property::Constant(v) if *v > 0.0 && v.is_finite() => Ok(()),
            Property::Constant(v) => Err(Error::invalid(name, format!("must be positive, got {v}"))),
            Property::Table(points) => {
                if points.len() < 2 {
                    return Err(Error::invalid(name, "table needs at least two rows"));
                }
                if points.windows(2).any(|w| w[1].0 <= w[0].0) {
                    return Err(Error::invalid(name, "table concentrations must be strictly increasing"));
                }
                if points.iter().any(|p| !(p.1 > 0.0)) {
                    return Err(Error::invalid(name, "table values must be positive"));
                }
                Ok(())
            }
        }
    }
}

/// Dimensional parameters of a single porous electrode against a Li-metal counter
/// electrode. SI units throughout.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalCellParams {
    pub electrode_thickness: f64,
    pub separator_thickness: f64,
    pub porosity: f64,
    /// Fraction of the solid volume that is active material.
    pub active_loading: f64,
    pub particle_radius: f64,
    pub solid_conductivity: f64,
    pub max_solid_concentration: f64,
    pub electrolyte_concentration: f64,
    pub transference_number: f64,
    pub ionic_conductivity: Property,
    pub electrolyte_diffusivity: Property,
    pub bruggeman_exponent: f64,
    pub temperature: f64,
    /// Double-layer capacitance per unit active area, F/m².
    pub double_layer_capacitance: f64,
}

impl PhysicalCellParams {
    /// Baseline NMC532 half-cell parameters.
    pub fn nmc532() -> Self {
        PhysicalCellParams {
            electrode_thickness: 100e-6,
            separator_thickness: 5e-6,
            porosity: 0.5,
            active_loading: 0.69,
            particle_radius: 500e-9,
            solid_conductivity: 0.1,
            max_solid_concentration: 4.95e4,
            electrolyte_concentration: 1000.0,
            transference_number: 0.38,
            ionic_conductivity: Property::Constant(1.0),
            electrolyte_diffusivity: Property::Constant(2e-10),
            bruggeman_exponent: -0.5,
            temperature: 298.15,
            double_layer_capacitance: 0.1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("electrode_thickness", self.electrode_thickness),
            ("separator_thickness", self.separator_thickness),
            ("particle_radius", self.particle_radius),
            ("solid_conductivity", self.solid_conductivity),
            ("max_solid_concentration", self.max_solid_concentration),
            ("electrolyte_concentration", self.electrolyte_concentration),
            ("temperature", self.temperature),
            ("double_layer_capacitance", self.double_layer_capacitance),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::invalid(name, format!("must be positive, got {v}")));
            }
        }
        if !(self.porosity > 0.0 && self.porosity < 1.0) {
            return Err(Error::invalid("porosity", format!("must lie in (0, 1), got {}", self.porosity)));
        }
        if !(self.transference_number > 0.0 && self.transference_number < 1.0) {
            return Err(Error::invalid(
                "transference_number",
                format!("must lie in (0, 1), got {}", self.transference_number),
            ));
        }
        if !(self.active_loading > 0.0 && self.active_loading <= 1.0) {
            return Err(Error::invalid(
                "active_loading",
                format!("must lie in (0, 1], got {}", self.active_loading),
            ));
        }
        if !self.bruggeman_exponent.is_finite() {
            return Err(Error::invalid("bruggeman_exponent", "must be finite"));
        }
        self.ionic_conductivity.validate("ionic_conductivity")?;
        self.electrolyte_diffusivity.validate("electrolyte_diffusivity")?;
        Ok(())
    }

    /// Active material volume fraction ε_am = (1 − ε_p)·loading.
    pub fn active_volume_fraction(&self) -> f64 {
        (1.0 - self.porosity) * self.active_loading
    }

    /// Active surface area per electrode volume for monodisperse spheres, 1/m.
    pub fn specific_area(&self) -> f64 {
        3.0 * self.active_volume_fraction() / self.particle_radius
    }

    /// Bruggeman factor ε^(1 − b); ε^1.5 for the usual exponent −0.5.
    pub fn bruggeman_factor(&self) -> f64 {
        self.porosity.powf(1.0 - self.bruggeman_exponent)
    }

    /// Effective ionic conductivity inside the electrode at electrolyte concentration `c`.
    pub fn effective_ionic_conductivity(&self, c: f64) -> f64 {
        self.ionic_conductivity.value(c) * self.bruggeman_factor()
    }

    /// Effective (porous) electrolyte diffusivity at concentration `c`.
    pub fn effective_diffusivity(&self, c: f64) -> f64 {
        self.electrolyte_diffusivity.value(c) * self.bruggeman_factor()
    }

    /// Pore-scale reference diffusivity D_eff/ε_p that sets the electrolyte time scale.
    pub fn reference_diffusivity(&self) -> f64 {
        self.effective_diffusivity(self.electrolyte_concentration) / self.porosity
    }

    pub fn thermal_voltage(&self) -> f64 {
        crate::thermal_voltage(self.temperature)
    }

    /// Areal charge stored by a fully lithiated electrode, C/m².
    pub fn areal_capacity(&self) -> f64 {
        FARADAY * self.electrode_thickness * self.active_volume_fraction() * self.max_solid_concentration
    }

    /// Areal current density of a given C-rate, A/m².
    pub fn c_rate_current(&self, c_rate: f64) -> f64 {
        self.areal_capacity() * c_rate / 3600.0
    }

    /// Migration (diffusion-potential) resistivity 2RT(1−t+)²/(F² D_eff c_ref), Ω·m.
    fn migration_resistivity(&self) -> f64 {
        let t = self.transference_number;
        2.0 * GAS_CONSTANT * self.temperature * (1.0 - t).powi(2)
            / (FARADAY * FARADAY
                * self.effective_diffusivity(self.electrolyte_concentration)
                * self.electrolyte_concentration)
    }
}

/// Dimensionless groups of the lean model at a given process time and current scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DimensionlessGroups {
    /// Reaction rate relative to electrolyte diffusion.
    pub da: f64,
    /// Reaction rate relative to the applied process rate.
    pub da_p: f64,
    /// Reaction rate relative to series electronic and ionic conduction.
    pub da_w: f64,
    pub da_w_sigma: f64,
    pub da_w_kappa: f64,
    /// Faradaic relative to double-layer charging rate.
    pub da_c: f64,
    pub tau_l: f64,
    pub t_p: f64,
    pub j_ref: f64,
}

impl DimensionlessGroups {
    /// Electronic share s = Da_w,σ/Da_w of the wiring group (0 when Da_w = 0).
    pub fn electronic_share(&self) -> f64 {
        if self.da_w > 0.0 {
            self.da_w_sigma / self.da_w
        } else {
            0.0
        }
    }

    /// Replaces Da_w, keeping the electronic/ionic split.
    pub fn with_wiring(mut self, da_w: f64) -> Self {
        let s = self.electronic_share();
        self.da_w = da_w;
        self.da_w_sigma = s * da_w;
        self.da_w_kappa = da_w - self.da_w_sigma;
        self
    }

    pub fn with_process(mut self, da_p: f64) -> Self {
        self.da_p = da_p;
        self
    }
}

/// Process time of a C-rate, s.
pub fn process_time(c_rate: f64) -> f64 {
    3600.0 / c_rate
}

/// Computes the dimensionless groups for process time `t_p` (s) and current scale
/// `j_ref` (A/m²).
pub fn compute_groups(params: &PhysicalCellParams, t_p: f64, j_ref: f64) -> Result<DimensionlessGroups> {
    groups(params, t_p, j_ref, true)
}

/// Groups for small-signal analysis: t_p = 1 s and no diffusion-potential contribution
/// to Da_w, since the electrolyte stays at its reference concentration.
pub fn compute_small_signal_groups(params: &PhysicalCellParams, j_ref: f64) -> Result<DimensionlessGroups> {
    groups(params, 1.0, j_ref, false)
}

fn groups(params: &PhysicalCellParams, t_p: f64, j_ref: f64, migration: bool) -> Result<DimensionlessGroups> {
    params.validate()?;
    if !(t_p > 0.0 && t_p.is_finite()) {
        return Err(Error::invalid("t_p", format!("must be positive, got {t_p}")));
    }
    if !(j_ref >= 0.0 && j_ref.is_finite()) {
        return Err(Error::invalid("j_ref", format!("must be non-negative, got {j_ref}")));
    }
    let p = params;
    let c_ref = p.electrolyte_concentration;
    let l2 = p.electrode_thickness.powi(2);
    let a = p.specific_area();
    let rt = GAS_CONSTANT * p.temperature;
    let d_eff = p.effective_diffusivity(c_ref);
    let kappa_eff = p.effective_ionic_conductivity(c_ref);

    let da = l2 * j_ref * a * (1.0 - p.transference_number) / (FARADAY * d_eff * c_ref);
    let da_p = t_p * j_ref * a / (p.active_volume_fraction() * FARADAY * p.max_solid_concentration);
    let wiring = FARADAY * l2 * j_ref * a / rt;
    let da_w_sigma = wiring / p.solid_conductivity;
    let mut da_w_kappa = wiring / kappa_eff;
    if migration {
        da_w_kappa += wiring * p.migration_resistivity();
    }
    Ok(DimensionlessGroups {
        da,
        da_p,
        da_w: da_w_sigma + da_w_kappa,
        da_w_sigma,
        da_w_kappa,
        da_c: FARADAY * j_ref * t_p / (rt * p.double_layer_capacitance),
        tau_l: l2 / (p.reference_diffusivity() * t_p),
        t_p,
        j_ref,
    })
}

/// Series conductivity of electronic, ionic and diffusion-potential paths, S/m.
pub fn effective_conductivity(params: &PhysicalCellParams, da: f64, j_ref: f64) -> Result<f64> {
    let p = params;
    if !(p.solid_conductivity > 0.0) {
        return Err(Error::invalid("solid_conductivity", "must be positive"));
    }
    let kappa = p.effective_ionic_conductivity(p.electrolyte_concentration);
    if !(kappa > 0.0) {
        return Err(Error::invalid("ionic_conductivity", "must be positive"));
    }
    let migration = if j_ref > 0.0 {
        2.0 * GAS_CONSTANT * p.temperature * (1.0 - p.transference_number) * da
            / (FARADAY * p.electrode_thickness.powi(2) * j_ref * p.specific_area())
    } else {
        p.migration_resistivity()
    };
    Ok(1.0 / (1.0 / p.solid_conductivity + 1.0 / kappa + migration))
}
