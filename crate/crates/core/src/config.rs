//! INI-style run configuration.
//!
//! ```text
//! [cell]
//! solid_conductivity = 0.1      # S/m
//! [run]
//! protocol = discharge
//! [discharge]
//! rates = 0.5, 1, 2
//! ```
//!
//! Every key is optional; omitted keys take the baseline NMC532 values. Lines starting
//! with `#` or `;` are comments, as is anything after ` #` or ` ;` on a value line.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::inference::NoiseMode;
use crate::kinetics::{ExchangeForm, KineticsModel, KineticsSpec, OcpCurve};
use crate::scaling::{PhysicalCellParams, Property};
use crate::{Error, Result};

/// Keys accepted in each section, with a one-line description and unit.
pub const SCHEMA: &[(&str, &[(&str, &str)])] = &[
    (
        "cell",
        &[
            ("electrode_thickness", "electrode thickness, m"),
            ("separator_thickness", "separator thickness, m"),
            ("porosity", "electrolyte volume fraction"),
            ("active_loading", "active fraction of the solid volume"),
            ("particle_radius", "particle radius, m"),
            ("solid_conductivity", "solid-phase conductivity, S/m"),
            ("max_solid_concentration", "lithium site density, mol/m³"),
            ("electrolyte_concentration", "reference salt concentration, mol/m³"),
            ("transference_number", "cation transference number"),
            ("ionic_conductivity", "S/m, a number or a CSV table path (concentration,value)"),
            ("electrolyte_diffusivity", "m²/s, a number or a CSV table path (concentration,value)"),
            ("bruggeman_exponent", "tortuosity exponent, ε_eff = ε^(1−b)"),
            ("temperature", "K"),
            ("double_layer_capacitance", "F/m² of active area"),
        ],
    ),
    (
        "kinetics",
        &[
            ("model", "ecit | butler_volmer | icet"),
            ("j0", "kinetic prefactor, A/m²"),
            ("reorganization_energy", "ECIT reorganization energy, eV"),
            ("adsorption_energy", "ECIT adsorption free energy, eV"),
            ("a_plus", "ECIT ion activity at reference concentration"),
            ("alpha", "transfer coefficient (butler_volmer, icet)"),
            ("exchange", "butler_volmer exchange current form: intercalation | constant"),
        ],
    ),
    ("ocp", &[("file", "two-column CSV x,ocv_volts; the bundled NMC532 curve if absent")]),
    (
        "run",
        &[
            ("protocol", "discharge | pulse | eis | fit | compare | sweep"),
            ("output", "output directory"),
            ("seed", "random seed recorded in every artifact"),
            ("initial_filling", "mean filling at the start of a discharge"),
            ("cutoff_volts", "discharge cutoff voltage, V"),
        ],
    ),
    (
        "discharge",
        &[("rates", "C-rates, comma separated"), ("points", "samples per analytic curve")],
    ),
    (
        "pulse",
        &[
            ("millivolts", "step sizes below the OCP, mV"),
            ("filling", "rest filling before the step"),
            ("time_constants", "duration in linear time constants"),
            ("points", "samples per transient"),
        ],
    ),
    (
        "eis",
        &[
            ("filling", "rest filling"),
            ("min_hz", "lowest frequency, Hz"),
            ("max_hz", "highest frequency, Hz"),
            ("per_decade", "frequencies per decade"),
            ("reference", "also extract Z from the nonlinear solver: true | false"),
        ],
    ),
    (
        "fit",
        &[
            ("rate", "C-rate of the synthetic discharge"),
            ("noise", "relative noise σ"),
            ("points", "observation count"),
            ("mode", "parameter | observation"),
            ("walkers", "ensemble size"),
            ("steps", "sampler steps"),
            ("grid", "landscape nodes per axis"),
            ("grid_factor", "landscape span ×/÷ around truth"),
        ],
    ),
    (
        "reference",
        &[("cells", "finite-volume cells"), ("dt", "initial time step, s")],
    ),
    (
        "sweep",
        &[
            ("rates", "C-rate axis"),
            ("solid_conductivity", "σ_s axis, S/m"),
            ("electrolyte_concentration", "c_l,ref axis, mol/m³"),
        ],
    ),
];

fn schema_keys(section: &str) -> Option<&'static [(&'static str, &'static str)]> {
    SCHEMA.iter().find(|(s, _)| *s == section).map(|(_, keys)| *keys)
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Entry {
    value: String,
    /// 1-based line and column of the value; line 0 marks a command-line override.
    line: usize,
    column: usize,
}

/// Raw section/key/value document, checked against [`SCHEMA`].
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Document {
    origin: PathBuf,
    sections: BTreeMap<String, BTreeMap<String, Entry>>,
}

impl Document {
    pub fn parse(text: &str, origin: &Path) -> Result<Self> {
        let err = |line: usize, column: usize, message: String| Error::Parse {
            path: origin.display().to_string(),
            line,
            column,
            message,
        };
        let mut doc = Document {
            origin: origin.to_path_buf(),
            sections: BTreeMap::new(),
        };
        let mut current: Option<String> = None;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let indent = raw.len() - raw.trim_start().len();
            let line = strip_comment(raw).trim_end();
            let body = line.trim_start();
            if body.is_empty() {
                continue;
            }
            if let Some(rest) = body.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| err(line_no, indent + body.len(), "expected ']' to close section header".into()))?
                    .trim();
                if schema_keys(name).is_none() {
                    return Err(err(line_no, indent + 2, format!("unknown section [{name}]")));
                }
                doc.sections.entry(name.to_string()).or_default();
                current = Some(name.to_string());
                continue;
            }
            let eq = body
                .find('=')
                .ok_or_else(|| err(line_no, indent + 1, "expected 'key = value'".into()))?;
            let key = body[..eq].trim();
            let section = current
                .clone()
                .ok_or_else(|| err(line_no, indent + 1, format!("key '{key}' appears before any section")))?;
            if key.is_empty() {
                return Err(err(line_no, indent + 1, "empty key".into()));
            }
            if !schema_keys(&section).unwrap_or_default().iter().any(|(k, _)| *k == key) {
                return Err(err(line_no, indent + 1, format!("unknown key '{key}' in [{section}]")));
            }
            let after = &body[eq + 1..];
            let value = after.trim();
            let column = indent + eq + 2 + (after.len() - after.trim_start().len());
            let entries = doc.sections.entry(section.clone()).or_default();
            if let Some(prev) = entries.get(key) {
                return Err(err(
                    line_no,
                    indent + 1,
                    format!("duplicate key '{key}' in [{section}] (first on line {})", prev.line),
                ));
            }
            entries.insert(
                key.to_string(),
                Entry {
                    value: value.to_string(),
                    line: line_no,
                    column,
                },
            );
        }
        Ok(doc)
    }

    /// Applies `key=value` or `section.key=value`. A bare key resolves to the section
    /// named by the active protocol when that section has it, otherwise to the only
    /// section that does.
    pub fn apply_override(&mut self, assignment: &str) -> Result<()> {
        let (lhs, value) = assignment
            .split_once('=')
            .ok_or_else(|| Error::invalid("--set", format!("expected key=value, got '{assignment}'")))?;
        let lhs = lhs.trim();
        let (section, key) = match lhs.split_once('.') {
            Some((s, k)) => {
                let keys = schema_keys(s).ok_or_else(|| Error::invalid("--set", format!("unknown section '{s}'")))?;
                if !keys.iter().any(|(name, _)| *name == k) {
                    return Err(Error::invalid("--set", format!("unknown key '{k}' in [{s}]")));
                }
                (s.to_string(), k.to_string())
            }
            None => (self.resolve_bare(lhs)?, lhs.to_string()),
        };
        self.sections.entry(section).or_default().insert(
            key,
            Entry {
                value: value.trim().to_string(),
                line: 0,
                column: 0,
            },
        );
        Ok(())
    }

    fn resolve_bare(&self, key: &str) -> Result<String> {
        let owners: Vec<&str> = SCHEMA
            .iter()
            .filter(|(_, keys)| keys.iter().any(|(k, _)| *k == key))
            .map(|(s, _)| *s)
            .collect();
        let protocol = match self.get("run", "protocol").unwrap_or("discharge") {
            "compare" => "discharge",
            other => other,
        };
        match owners.as_slice() {
            [] => Err(Error::invalid("--set", format!("unknown key '{key}'"))),
            [one] => Ok(one.to_string()),
            many => many
                .iter()
                .find(|s| **s == protocol)
                .map(|s| s.to_string())
                .ok_or_else(|| {
                    Error::invalid("--set", format!("key '{key}' is ambiguous; use one of {}", many.join(", ")))
                }),
        }
    }

    pub fn get(&self, section: &str, key: &str) -> Option<&str> {
        self.sections.get(section)?.get(key).map(|e| e.value.as_str())
    }

    fn value_error(&self, section: &str, key: &str, message: String) -> Error {
        match self.sections.get(section).and_then(|s| s.get(key)) {
            Some(e) if e.line > 0 => Error::Parse {
                path: self.origin.display().to_string(),
                line: e.line,
                column: e.column,
                message: format!("{section}.{key}: {message}"),
            },
            _ => Error::Parse {
                path: "--set".to_string(),
                line: 0,
                column: 0,
                message: format!("{section}.{key}: {message}"),
            },
        }
    }

    fn parsed<T: FromStr>(&self, section: &str, key: &str, default: T) -> Result<T>
    where
        T::Err: fmt::Display,
    {
        match self.get(section, key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|e: T::Err| self.value_error(section, key, format!("cannot parse '{v}': {e}"))),
        }
    }

    fn list(&self, section: &str, key: &str, default: &[f64]) -> Result<Vec<f64>> {
        match self.get(section, key) {
            None => Ok(default.to_vec()),
            Some(v) => parse_list(v).map_err(|m| self.value_error(section, key, m)),
        }
    }

    fn choice<'c>(&self, section: &str, key: &str, default: &'c str, options: &[&'c str]) -> Result<&'c str> {
        match self.get(section, key) {
            None => Ok(default),
            Some(v) => options.iter().copied().find(|o| *o == v).ok_or_else(|| {
                self.value_error(section, key, format!("'{v}' is not one of {}", options.join(", ")))
            }),
        }
    }
}

fn strip_comment(line: &str) -> &str {
    let trimmed = line.trim_start();
    if trimmed.starts_with('#') || trimmed.starts_with(';') {
        return "";
    }
    let cut = [" #", "\t#", " ;", "\t;"].iter().filter_map(|m| line.find(m)).min();
    match cut {
        Some(k) => &line[..k],
        None => line,
    }
}

/// Parses a comma-separated list of numbers.
pub fn parse_list(text: &str) -> std::result::Result<Vec<f64>, String> {
    let values: std::result::Result<Vec<f64>, String> = text
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| format!("cannot parse '{}' as a number: {e}", t.trim())))
        .collect();
    let values = values?;
    if values.is_empty() {
        return Err("empty list".to_string());
    }
    Ok(values)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProtocolKind {
    Discharge,
    Pulse,
    Eis,
    Fit,
    Compare,
    Sweep,
}

impl ProtocolKind {
    pub fn name(self) -> &'static str {
        match self {
            ProtocolKind::Discharge => "discharge",
            ProtocolKind::Pulse => "pulse",
            ProtocolKind::Eis => "eis",
            ProtocolKind::Fit => "fit",
            ProtocolKind::Compare => "compare",
            ProtocolKind::Sweep => "sweep",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DischargeSettings {
    pub rates: Vec<f64>,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PulseSettings {
    pub millivolts: Vec<f64>,
    pub filling: f64,
    pub time_constants: f64,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EisSettings {
    pub filling: f64,
    pub min_hz: f64,
    pub max_hz: f64,
    pub per_decade: usize,
    pub reference: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitSettings {
    pub rate: f64,
    pub noise: f64,
    pub points: usize,
    pub mode: NoiseMode,
    pub walkers: usize,
    pub steps: usize,
    pub grid: usize,
    pub grid_factor: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceSettings {
    pub cells: usize,
    pub dt: f64,
}

/// A physical quantity varied in a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AxisKind {
    Rate,
    SolidConductivity,
    ElectrolyteConcentration,
}

impl AxisKind {
    pub fn name(self) -> &'static str {
        match self {
            AxisKind::Rate => "rate",
            AxisKind::SolidConductivity => "solid_conductivity",
            AxisKind::ElectrolyteConcentration => "electrolyte_concentration",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "rate" | "rates" | "c_rate" => Ok(AxisKind::Rate),
            "solid_conductivity" | "sigma_s" => Ok(AxisKind::SolidConductivity),
            "electrolyte_concentration" | "c_l" => Ok(AxisKind::ElectrolyteConcentration),
            _ => Err(Error::invalid(
                "axis",
                format!("unknown axis '{name}'; use rate, solid_conductivity or electrolyte_concentration"),
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepAxis {
    pub kind: AxisKind,
    pub values: Vec<f64>,
}

impl SweepAxis {
    /// Parses `name=v1,v2,...`.
    pub fn parse(spec: &str) -> Result<Self> {
        let (name, values) = spec
            .split_once('=')
            .ok_or_else(|| Error::invalid("axis", format!("expected name=v1,v2,..., got '{spec}'")))?;
        let kind = AxisKind::parse(name.trim())?;
        let values = parse_list(values).map_err(|m| Error::invalid("axis", m))?;
        Ok(SweepAxis { kind, values })
    }
}

/// Fully resolved run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    /// Original document text, hashed into artifact headers.
    pub text: String,
    pub cell: PhysicalCellParams,
    pub kinetics: KineticsSpec,
    pub ocp: OcpCurve,
    pub protocol: ProtocolKind,
    pub output: PathBuf,
    pub seed: u64,
    pub initial_filling: f64,
    pub cutoff_volts: f64,
    pub discharge: DischargeSettings,
    pub pulse: PulseSettings,
    pub eis: EisSettings,
    pub fit: FitSettings,
    pub reference: ReferenceSettings,
    pub sweep: Vec<SweepAxis>,
}

impl RunConfig {
    /// Baseline configuration with every key at its default.
    pub fn baseline() -> Self {
        Self::from_document(&Document::default(), Path::new("."), String::new())
            .expect("defaults are valid")
    }

    /// Reads a config file, applies overrides and resolves relative paths against the
    /// file's directory.
    pub fn load(path: &Path, overrides: &[String]) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_text(&text, path, overrides)
    }

    pub fn from_text(text: &str, origin: &Path, overrides: &[String]) -> Result<Self> {
        let mut doc = Document::parse(text, origin)?;
        for o in overrides {
            doc.apply_override(o)?;
        }
        let base = origin.parent().unwrap_or(Path::new("."));
        let mut hashed = text.to_string();
        for o in overrides {
            hashed.push_str("\n--set ");
            hashed.push_str(o);
        }
        Self::from_document(&doc, base, hashed)
    }

    fn from_document(doc: &Document, base: &Path, text: String) -> Result<Self> {
        let d = PhysicalCellParams::nmc532();
        let property = |key: &str, default: &Property| -> Result<Property> {
            match doc.get("cell", key) {
                None => Ok(default.clone()),
                Some(v) => match v.parse::<f64>() {
                    Ok(x) => Ok(Property::Constant(x)),
                    Err(_) => read_table(&base.join(v)),
                },
            }
        };
        let cell = PhysicalCellParams {
            electrode_thickness: doc.parsed("cell", "electrode_thickness", d.electrode_thickness)?,
            separator_thickness: doc.parsed("cell", "separator_thickness", d.separator_thickness)?,
            porosity: doc.parsed("cell", "porosity", d.porosity)?,
            active_loading: doc.parsed("cell", "active_loading", d.active_loading)?,
            particle_radius: doc.parsed("cell", "particle_radius", d.particle_radius)?,
            solid_conductivity: doc.parsed("cell", "solid_conductivity", d.solid_conductivity)?,
            max_solid_concentration: doc.parsed("cell", "max_solid_concentration", d.max_solid_concentration)?,
            electrolyte_concentration: doc.parsed("cell", "electrolyte_concentration", d.electrolyte_concentration)?,
            transference_number: doc.parsed("cell", "transference_number", d.transference_number)?,
            ionic_conductivity: property("ionic_conductivity", &d.ionic_conductivity)?,
            electrolyte_diffusivity: property("electrolyte_diffusivity", &d.electrolyte_diffusivity)?,
            bruggeman_exponent: doc.parsed("cell", "bruggeman_exponent", d.bruggeman_exponent)?,
            temperature: doc.parsed("cell", "temperature", d.temperature)?,
            double_layer_capacitance: doc.parsed("cell", "double_layer_capacitance", d.double_layer_capacitance)?,
        };
        cell.validate()?;

        let j0 = doc.parsed("kinetics", "j0", 5.0)?;
        let alpha = doc.parsed("kinetics", "alpha", 0.5)?;
        let kinetics = match doc.choice("kinetics", "model", "ecit", &["ecit", "butler_volmer", "icet"])? {
            "ecit" => KineticsSpec::ecit_from_energies(
                j0,
                doc.parsed("kinetics", "reorganization_energy", 0.11)?,
                doc.parsed("kinetics", "adsorption_energy", 0.025)?,
                doc.parsed("kinetics", "a_plus", 1.9)?,
                cell.temperature,
            ),
            "icet" => KineticsSpec {
                j0,
                model: KineticsModel::Icet { alpha },
            },
            _ => KineticsSpec {
                j0,
                model: KineticsModel::ButlerVolmer {
                    alpha,
                    exchange: match doc.choice("kinetics", "exchange", "intercalation", &["intercalation", "constant"])? {
                        "constant" => ExchangeForm::Constant,
                        _ => ExchangeForm::Intercalation,
                    },
                },
            },
        };
        kinetics.validate()?;

        let ocp = match doc.get("ocp", "file") {
            Some(f) => OcpCurve::from_csv(&base.join(f))?,
            None => OcpCurve::nmc532(),
        };

        let protocol = match doc.choice(
            "run",
            "protocol",
            "discharge",
            &["discharge", "pulse", "eis", "fit", "compare", "sweep"],
        )? {
            "pulse" => ProtocolKind::Pulse,
            "eis" => ProtocolKind::Eis,
            "fit" => ProtocolKind::Fit,
            "compare" => ProtocolKind::Compare,
            "sweep" => ProtocolKind::Sweep,
            _ => ProtocolKind::Discharge,
        };

        let positive_list = |section: &str, key: &str, default: &[f64]| -> Result<Vec<f64>> {
            let v = doc.list(section, key, default)?;
            if v.iter().any(|x| !(*x > 0.0 && x.is_finite())) {
                return Err(doc.value_error(section, key, "values must be positive".into()));
            }
            Ok(v)
        };
        let mut sweep = Vec::new();
        for (key, kind, default) in [
            ("rates", AxisKind::Rate, &[0.5, 1.0, 2.0][..]),
            ("solid_conductivity", AxisKind::SolidConductivity, &[0.01, 0.1, 1.0][..]),
            ("electrolyte_concentration", AxisKind::ElectrolyteConcentration, &[500.0, 1000.0, 2000.0][..]),
        ] {
            sweep.push(SweepAxis {
                kind,
                values: positive_list("sweep", key, default)?,
            });
        }

        let config = RunConfig {
            text,
            protocol,
            output: PathBuf::from(doc.get("run", "output").unwrap_or("lean-pet-output")),
            seed: doc.parsed("run", "seed", 0u64)?,
            initial_filling: doc.parsed("run", "initial_filling", 0.1)?,
            cutoff_volts: doc.parsed("run", "cutoff_volts", 3.0)?,
            discharge: DischargeSettings {
                rates: positive_list("discharge", "rates", &[0.5, 1.0, 2.0])?,
                points: doc.parsed("discharge", "points", 400usize)?,
            },
            pulse: PulseSettings {
                millivolts: doc.list("pulse", "millivolts", &[25.0, 50.0, 100.0])?,
                filling: doc.parsed("pulse", "filling", 0.5)?,
                time_constants: doc.parsed("pulse", "time_constants", 5.0)?,
                points: doc.parsed("pulse", "points", 400usize)?,
            },
            eis: EisSettings {
                filling: doc.parsed("eis", "filling", 0.5)?,
                min_hz: doc.parsed("eis", "min_hz", 0.01)?,
                max_hz: doc.parsed("eis", "max_hz", 100.0)?,
                per_decade: doc.parsed("eis", "per_decade", 5usize)?,
                reference: doc.parsed("eis", "reference", false)?,
            },
            fit: FitSettings {
                rate: doc.parsed("fit", "rate", 1.0)?,
                noise: doc.parsed("fit", "noise", 0.05)?,
                points: doc.parsed("fit", "points", 100usize)?,
                mode: match doc.choice("fit", "mode", "parameter", &["parameter", "observation"])? {
                    "observation" => NoiseMode::Observation,
                    _ => NoiseMode::Parameter,
                },
                walkers: doc.parsed("fit", "walkers", 32usize)?,
                steps: doc.parsed("fit", "steps", 2000usize)?,
                grid: doc.parsed("fit", "grid", 50usize)?,
                grid_factor: doc.parsed("fit", "grid_factor", 4.0)?,
            },
            reference: ReferenceSettings {
                cells: doc.parsed("reference", "cells", 50usize)?,
                dt: doc.parsed("reference", "dt", 1.0)?,
            },
            sweep,
            cell,
            kinetics,
            ocp,
        };
        config.check(doc)?;
        Ok(config)
    }

    fn check(&self, doc: &Document) -> Result<()> {
        let (lo, hi) = self.ocp.range();
        let in_range = |section: &str, key: &str, v: f64| -> Result<()> {
            if v >= lo && v <= hi {
                Ok(())
            } else {
                Err(doc.value_error(section, key, format!("{v} outside the OCP range [{lo}, {hi}]")))
            }
        };
        in_range("run", "initial_filling", self.initial_filling)?;
        in_range("pulse", "filling", self.pulse.filling)?;
        in_range("eis", "filling", self.eis.filling)?;
        if !(self.eis.min_hz > 0.0 && self.eis.max_hz > self.eis.min_hz) {
            return Err(doc.value_error("eis", "max_hz", "need 0 < min_hz < max_hz".into()));
        }
        if !(self.fit.noise > 0.0) {
            return Err(doc.value_error("fit", "noise", "must be positive".into()));
        }
        if !(self.fit.rate > 0.0) {
            return Err(doc.value_error("fit", "rate", "must be positive".into()));
        }
        if self.reference.cells < 8 {
            return Err(doc.value_error("reference", "cells", "need at least 8 cells".into()));
        }
        if !(self.reference.dt > 0.0) {
            return Err(doc.value_error("reference", "dt", "must be positive".into()));
        }
        Ok(())
    }
}

fn read_table(path: &Path) -> Result<Property> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut points = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || (idx == 0 && line.chars().any(|c| c.is_ascii_alphabetic() && c != 'e' && c != 'E')) {
            continue;
        }
        let mut fields = line.split(',');
        let parse = |f: Option<&str>, column: usize| -> Result<f64> {
            f.and_then(|t| t.trim().parse().ok()).ok_or_else(|| Error::Parse {
                path: path.display().to_string(),
                line: idx + 1,
                column,
                message: "expected two numeric columns".into(),
            })
        };
        let c = parse(fields.next(), 1)?;
        let v = parse(fields.next(), 2)?;
        points.push((c, v));
    }
    Ok(Property::Table(points))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<RunConfig> {
        RunConfig::from_text(text, Path::new("test.cfg"), &[])
    }

    #[test]
    fn empty_document_is_baseline() {
        let c = parse("").unwrap();
        assert_eq!(c.cell, PhysicalCellParams::nmc532());
        assert_eq!(c.kinetics, KineticsSpec::nmc532());
        assert_eq!(c.protocol, ProtocolKind::Discharge);
    }

    #[test]
    fn values_and_comments() {
        let c = parse("# top\n[cell]\nsolid_conductivity = 0.5  # S/m\n; note\n[discharge]\nrates = 1, 2\n").unwrap();
        assert_eq!(c.cell.solid_conductivity, 0.5);
        assert_eq!(c.discharge.rates, vec![1.0, 2.0]);
    }

    #[test]
    fn parse_errors_carry_line_and_column() {
        match parse("[cell]\nporosity = abc\n") {
            Err(Error::Parse { line, column, .. }) => assert_eq!((line, column), (2, 12)),
            other => panic!("{other:?}"),
        }
        match parse("[cell]\n  bogus = 1\n") {
            Err(Error::Parse { line, column, .. }) => assert_eq!((line, column), (2, 3)),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse("[nowhere]\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse("porosity = 0.3\n"), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn bare_override_follows_protocol() {
        let sets = ["protocol=sweep".to_string(), "rates=0.5,1".to_string()];
        let c = RunConfig::from_text("", Path::new("x.cfg"), &sets).unwrap();
        assert_eq!(c.sweep[0].values, vec![0.5, 1.0]);
        assert_eq!(c.discharge.rates, vec![0.5, 1.0, 2.0]);
        let c = RunConfig::from_text("", Path::new("x.cfg"), &["rates=3".to_string()]).unwrap();
        assert_eq!(c.discharge.rates, vec![3.0]);
        assert!(RunConfig::from_text("", Path::new("x.cfg"), &["nothing=1".to_string()]).is_err());
        let c = RunConfig::from_text("", Path::new("x.cfg"), &["cell.porosity=0.4".to_string()]).unwrap();
        assert_eq!(c.cell.porosity, 0.4);
    }

    #[test]
    fn invalid_physics_is_rejected() {
        assert!(matches!(parse("[cell]\nporosity = 1.5\n"), Err(Error::InvalidParameter { .. })));
    }
}
