//! Protocol runners behind the command-line tool. Each runner returns its CSV tables
//! and summary lines; writing them is left to the caller.

use std::time::Duration;

use rayon::prelude::*;

use crate::analytic::{
    frequency_grid, pulse_current, simulate_discharge, validity_over, GalvanostaticSolution, ImpedanceModel, ImpedancePoint,
    LeanCell, PulseOptions, ValidityReport,
};
use crate::config::{AxisKind, ProtocolKind, RunConfig, SweepAxis};
use crate::inference::{
    chi_square_landscape, ensemble_mcmc, histogram_modes, synthesize_data, FitProblem, LandscapeGrid, McmcOptions, Parameter,
    SynthesisOptions,
};
use crate::kinetics::{KineticsSpec, OcpCurve};
use crate::output::{format_number, Csv};
use crate::refsolver::{extract_impedance, rmse, solve_nonlinear, EisOptions, Grid1D, NonlinearOptions, NonlinearSolution, Protocol};
use crate::scaling::{compute_groups, process_time, DimensionlessGroups, PhysicalCellParams};
use crate::Result;

/// One output table and the file name it should be written under.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub file_name: String,
    pub table: Csv,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    pub artifacts: Vec<Artifact>,
    pub summary: Vec<String>,
}

impl Report {
    fn add(&mut self, file_name: impl Into<String>, table: Csv) {
        self.artifacts.push(Artifact {
            file_name: file_name.into(),
            table,
        });
    }

    fn line(&mut self, text: impl Into<String>) {
        self.summary.push(text.into());
    }
}

/// Runs the protocol selected in the configuration.
pub fn execute(config: &RunConfig) -> Result<Report> {
    match config.protocol {
        ProtocolKind::Discharge => discharge(config),
        ProtocolKind::Compare => compare(config),
        ProtocolKind::Pulse => pulse(config),
        ProtocolKind::Eis => eis(config),
        ProtocolKind::Fit => fit(config),
        ProtocolKind::Sweep => sweep(config, &config.sweep),
    }
}

fn rate_label(rate: f64) -> String {
    format!("{rate}C")
}

fn groups_line(label: &str, g: &DimensionlessGroups) -> String {
    format!(
        "{label}: Da = {} Da_p = {} Da_w = {} (sigma {} kappa {}) Da_c = {} tau_l = {} t_p = {} s",
        format_number(g.da),
        format_number(g.da_p),
        format_number(g.da_w),
        format_number(g.da_w_sigma),
        format_number(g.da_w_kappa),
        format_number(g.da_c),
        format_number(g.tau_l),
        format_number(g.t_p),
    )
}

fn validity_line(label: &str, v: &ValidityReport) -> String {
    format!(
        "{label}: validity ratio {} ({}), Da_w/(100 Da_p) = {} ({})",
        format_number(v.ratio),
        if v.valid { "valid" } else { "outside bound" },
        format_number(v.coarse_ratio),
        if v.coarse_valid { "valid" } else { "outside bound" },
    )
}

/// Groups at a C-rate for the configured cell.
pub fn groups_at(config: &RunConfig, rate: f64) -> Result<DimensionlessGroups> {
    compute_groups(&config.cell, process_time(rate), config.kinetics.j0)
}

fn analytic_discharge<'a>(
    params: &PhysicalCellParams,
    kinetics: &'a KineticsSpec,
    ocp: &'a OcpCurve,
    rate: f64,
    config: &RunConfig,
) -> Result<(LeanCell<'a>, GalvanostaticSolution)> {
    let groups = compute_groups(params, process_time(rate), kinetics.j0)?;
    let cell = LeanCell::new(groups, kinetics, ocp, params.thermal_voltage());
    let sol = simulate_discharge(&cell, config.initial_filling, config.cutoff_volts, config.discharge.points, 0)?;
    Ok((cell, sol))
}

fn analytic_table(sol: &GalvanostaticSolution, groups: &DimensionlessGroups, current: f64) -> Csv {
    let mut csv = Csv::new(&["t_seconds", "voltage_volts", "current_apm2", "mean_filling"]);
    for k in 0..sol.times.len() {
        csv.push(&[sol.times[k] * groups.t_p, sol.voltage[k], current, sol.mean_filling[k]]);
    }
    csv
}

fn solution_table(sol: &NonlinearSolution) -> Csv {
    let mut csv = Csv::new(&["t_seconds", "voltage_volts", "current_apm2", "mean_filling"]);
    for k in 0..sol.times.len() {
        csv.push(&[sol.times[k], sol.voltage[k], sol.current[k], sol.mean_filling[k]]);
    }
    csv
}

pub fn discharge(config: &RunConfig) -> Result<Report> {
    let mut report = Report::default();
    for &rate in &config.discharge.rates {
        let (cell, sol) = analytic_discharge(&config.cell, &config.kinetics, &config.ocp, rate, config)?;
        let label = rate_label(rate);
        report.line(groups_line(&label, &cell.groups));
        if !sol.is_empty() {
            report.line(validity_line(&label, &validity_over(&cell, &sol.mean_filling)?));
            report.line(format!(
                "{label}: end filling {} at {} V ({:?})",
                format_number(*sol.mean_filling.last().unwrap_or(&f64::NAN)),
                format_number(*sol.voltage.last().unwrap_or(&f64::NAN)),
                sol.termination
            ));
        }
        report.add(
            format!("discharge_{label}.csv"),
            analytic_table(&sol, &cell.groups, config.cell.c_rate_current(rate)),
        );
    }
    Ok(report)
}

/// Analytic and nonlinear discharges of one parameter set at one rate.
#[derive(Debug, Clone)]
pub struct Comparison {
    pub groups: DimensionlessGroups,
    pub analytic: GalvanostaticSolution,
    pub reference: NonlinearSolution,
    /// Voltage RMSE over the common filling range, V.
    pub rmse: f64,
    /// Least favourable validity along the analytic trajectory.
    pub validity: ValidityReport,
    pub reference_runtime: Duration,
}

pub fn compare_discharge(params: &PhysicalCellParams, config: &RunConfig, rate: f64) -> Result<Comparison> {
    let (cell, analytic) = analytic_discharge(params, &config.kinetics, &config.ocp, rate, config)?;
    let validity = validity_over(&cell, &analytic.mean_filling)?;
    let t_p = process_time(rate);
    let mut opts = NonlinearOptions::new(Grid1D::new(config.reference.cells)?, config.reference.dt, 2.0 * t_p);
    opts.cutoff = Some(config.cutoff_volts);
    let start = std::time::Instant::now();
    let reference = solve_nonlinear(
        params,
        &config.kinetics,
        &config.ocp,
        Protocol::ConstantCurrent {
            current: params.c_rate_current(rate),
        },
        config.initial_filling,
        &opts,
    )?;
    let reference_runtime = start.elapsed();
    let rmse = rmse(&analytic.curve(), &reference.curve())?;
    Ok(Comparison {
        groups: cell.groups,
        analytic,
        reference,
        rmse,
        validity,
        reference_runtime,
    })
}

pub fn compare(config: &RunConfig) -> Result<Report> {
    let mut report = Report::default();
    let mut table = Csv::new(&["c_rate", "rmse_volts", "validity_ratio", "coarse_ratio"]);
    let mut sq = 0.0;
    for &rate in &config.discharge.rates {
        let cmp = compare_discharge(&config.cell, config, rate)?;
        let label = rate_label(rate);
        report.line(groups_line(&label, &cmp.groups));
        report.line(validity_line(&label, &cmp.validity));
        report.line(format!("{label}: RMSE analytic vs nonlinear = {} V", format_number(cmp.rmse)));
        table.push(&[rate, cmp.rmse, cmp.validity.ratio, cmp.validity.coarse_ratio]);
        sq += cmp.rmse * cmp.rmse;
        report.add(
            format!("compare_{label}_analytic.csv"),
            analytic_table(&cmp.analytic, &cmp.groups, config.cell.c_rate_current(rate)),
        );
        report.add(format!("compare_{label}_reference.csv"), solution_table(&cmp.reference));
    }
    let n = config.discharge.rates.len() as f64;
    report.line(format!("aggregate RMSE = {} V", format_number((sq / n).sqrt())));
    report.add("compare_rmse.csv", table);
    Ok(report)
}

pub fn pulse(config: &RunConfig) -> Result<Report> {
    let mut report = Report::default();
    let groups = groups_at(config, 1.0)?;
    let cell = LeanCell::new(groups, &config.kinetics, &config.ocp, config.cell.thermal_voltage());
    let c0 = config.pulse.filling;
    let rest = config.ocp.ocp(c0)?;
    let scale = config.cell.areal_capacity() / groups.t_p;
    report.line(groups_line("1C scale", &groups));
    for &mv in &config.pulse.millivolts {
        let applied = rest - mv * 1e-3;
        let probe = pulse_current(&cell, c0, applied, 1.0, PulseOptions { points: 2, nonlinear: false })?;
        let duration = config.pulse.time_constants / probe.rate.abs();
        let points = config.pulse.points;
        let linear = pulse_current(&cell, c0, applied, duration, PulseOptions { points, nonlinear: false })?;
        let ode = pulse_current(&cell, c0, applied, duration, PulseOptions { points, nonlinear: true })?;
        let peak = ode.current.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let err = (linear.current.iter().zip(&ode.current).map(|(a, b)| (a - b).powi(2)).sum::<f64>() / points as f64).sqrt();
        report.line(format!(
            "{mv} mV: time constant {} s, relative RMSE linear vs ODE = {}",
            format_number(groups.t_p / probe.rate.abs()),
            format_number(err / peak)
        ));
        for (name, tr) in [("linear", &linear), ("ode", &ode)] {
            let mut csv = Csv::new(&["t_seconds", "voltage_volts", "current_apm2", "mean_filling"]);
            let eq = tr.equilibrium_filling;
            for k in 0..tr.times.len() {
                let t = tr.times[k];
                let filling = eq + (c0 - eq) * (tr.rate * t).exp();
                csv.push(&[t * groups.t_p, applied, tr.current[k] * scale, filling]);
            }
            report.add(format!("pulse_{mv}mV_{name}.csv"), csv);
        }
    }
    Ok(report)
}

fn impedance_table(points: &[ImpedancePoint]) -> Csv {
    let mut csv = Csv::new(&["freq_hz", "re_z_ohm_m2", "im_z_ohm_m2"]);
    for p in points {
        csv.push(&[p.frequency_hz(), p.z.re, p.z.im]);
    }
    csv
}

pub fn eis(config: &RunConfig) -> Result<Report> {
    let mut report = Report::default();
    let s = &config.eis;
    let freqs = frequency_grid(s.min_hz, s.max_hz, s.per_decade);
    let model = ImpedanceModel::at_rest(&config.cell, &config.kinetics, &config.ocp, s.filling)?;
    report.line(groups_line("small-signal", &model.groups));
    let omegas: Vec<f64> = freqs.iter().map(|f| f * std::f64::consts::TAU).collect();
    let analytic = model.spectrum(&omegas)?;
    if let Some(arc) = crate::analytic::arc_features(&analytic) {
        report.line(format!(
            "charge-transfer arc: apex {} Hz, diameter {} ohm m2",
            format_number(arc.apex_hz),
            format_number(arc.diameter())
        ));
    }
    if s.reference {
        let options = EisOptions {
            grid: Grid1D::new(config.reference.cells)?,
            ..EisOptions::default()
        };
        let reference = extract_impedance(&config.cell, &config.kinetics, &config.ocp, s.filling, &freqs, &options)?;
        let mut worst_mod = 0.0f64;
        let mut worst_phase = 0.0f64;
        for (a, r) in analytic.iter().zip(&reference) {
            worst_mod = worst_mod.max((a.z.norm() / r.z.norm() - 1.0).abs());
            worst_phase = worst_phase.max((a.phase_degrees() - r.phase_degrees()).abs());
        }
        report.line(format!(
            "analytic vs nonlinear: max modulus deviation {}, max phase deviation {} deg",
            format_number(worst_mod),
            format_number(worst_phase)
        ));
        report.add("eis_reference.csv", impedance_table(&reference));
    }
    report.add("eis_analytic.csv", impedance_table(&analytic));
    Ok(report)
}

pub fn fit(config: &RunConfig) -> Result<Report> {
    let mut report = Report::default();
    let f = &config.fit;
    let groups = groups_at(config, f.rate)?;
    let cell = LeanCell::new(groups, &config.kinetics, &config.ocp, config.cell.thermal_voltage());
    report.line(groups_line("truth", &groups));
    let data = synthesize_data(
        &cell,
        &SynthesisOptions {
            points: f.points,
            noise_fraction: f.noise,
            mode: f.mode,
            seed: config.seed,
            ..SynthesisOptions::default()
        },
    )?;
    report.add("fit_data.csv", data.to_csv());
    let problem = FitProblem::new(cell, data, vec![Parameter::Wiring, Parameter::Process], f.noise)?;
    let grid = LandscapeGrid::log_around((groups.da_w, groups.da_p), f.grid_factor, f.grid)?;
    let landscape = chi_square_landscape(&problem, &grid)?;
    let start = landscape.argmin_values().unwrap_or((groups.da_w, groups.da_p));
    report.line(format!(
        "landscape argmin Da_w = {} Da_p = {} chi2 = {} ({} failed nodes)",
        format_number(start.0),
        format_number(start.1),
        format_number(landscape.min_value().unwrap_or(f64::NAN)),
        landscape.failed
    ));
    report.add("fit_landscape.csv", landscape.to_csv());
    let options = McmcOptions {
        walkers: f.walkers,
        steps: f.steps,
        ..McmcOptions::default()
    };
    let post = ensemble_mcmc(&problem, &[start.0, start.1], &options, config.seed)?;
    for (k, p) in problem.free.iter().enumerate() {
        let m = post.marginal(k);
        let q = |x| crate::inference::quantile(&m, x);
        report.line(format!(
            "{}: median {} (16% {}, 84% {}), {} mode(s), autocorrelation {} steps",
            p.name(),
            format_number(q(0.5).exp()),
            format_number(q(0.16).exp()),
            format_number(q(0.84).exp()),
            histogram_modes(&m, 20),
            format_number(post.autocorrelation_time(k))
        ));
    }
    report.line(format!(
        "acceptance {} after {} burn-in steps",
        format_number(post.acceptance_rate),
        post.burn_in
    ));
    report.add("fit_chains.csv", post.to_csv(&["log_da_w", "log_da_p"]));
    Ok(report)
}

/// One node of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub rate: f64,
    pub solid_conductivity: f64,
    pub electrolyte_concentration: f64,
    /// NaN when either model failed.
    pub rmse: f64,
    pub validity_ratio: f64,
    pub coarse_ratio: f64,
}

impl SweepPoint {
    /// Inside the region where the lean model is expected to hold.
    pub fn in_region(&self) -> bool {
        self.validity_ratio < 1.0 && self.coarse_ratio <= 1.0
    }
}

/// Cross product of the axes; unspecified quantities keep the configured cell and a
/// rate of 1 C. Failed nodes are recorded with NaN RMSE.
pub fn sweep_points(config: &RunConfig, axes: &[SweepAxis]) -> Vec<SweepPoint> {
    let axis = |kind: AxisKind, default: f64| {
        axes.iter()
            .rev()
            .find(|a| a.kind == kind)
            .map_or(vec![default], |a| a.values.clone())
    };
    let rates = axis(AxisKind::Rate, 1.0);
    let sigmas = axis(AxisKind::SolidConductivity, config.cell.solid_conductivity);
    let concs = axis(AxisKind::ElectrolyteConcentration, config.cell.electrolyte_concentration);
    let mut nodes = Vec::new();
    for &r in &rates {
        for &s in &sigmas {
            for &c in &concs {
                nodes.push((r, s, c));
            }
        }
    }
    nodes
        .par_iter()
        .map(|&(rate, sigma, conc)| {
            let mut params = config.cell.clone();
            params.solid_conductivity = sigma;
            params.electrolyte_concentration = conc;
            let (rmse, validity_ratio, coarse_ratio) = match compare_discharge(&params, config, rate) {
                Ok(c) => (c.rmse, c.validity.ratio, c.validity.coarse_ratio),
                Err(_) => (f64::NAN, f64::NAN, f64::NAN),
            };
            SweepPoint {
                rate,
                solid_conductivity: sigma,
                electrolyte_concentration: conc,
                rmse,
                validity_ratio,
                coarse_ratio,
            }
        })
        .collect()
}

pub fn sweep(config: &RunConfig, axes: &[SweepAxis]) -> Result<Report> {
    let mut report = Report::default();
    let points = sweep_points(config, axes);
    let mut csv = Csv::new(&[
        "c_rate",
        "solid_conductivity",
        "electrolyte_concentration",
        "rmse_volts",
        "validity_ratio",
        "coarse_ratio",
    ]);
    for p in &points {
        csv.push(&[p.rate, p.solid_conductivity, p.electrolyte_concentration, p.rmse, p.validity_ratio, p.coarse_ratio]);
    }
    report.add("sweep_rmse.csv", csv);
    let failed = points.iter().filter(|p| p.rmse.is_nan()).count();
    report.line(format!("{} sweep points, {failed} failed", points.len()));
    let max_in = points.iter().filter(|p| p.in_region()).map(|p| p.rmse).fold(f64::NAN, f64::max);
    let min_out = points
        .iter()
        .filter(|p| !p.in_region() && !p.rmse.is_nan())
        .map(|p| p.rmse)
        .fold(f64::NAN, f64::min);
    report.line(format!("largest RMSE inside the validity region: {} V", format_number(max_in)));
    report.line(format!("smallest RMSE outside the validity region: {} V", format_number(min_out)));
    for rate in unique(points.iter().map(|p| p.rate)) {
        let row: Vec<&SweepPoint> = points.iter().filter(|p| p.rate == rate).collect();
        if row.iter().all(|p| p.rmse.is_nan()) {
            report.line(format!("warning: every point at {} failed", rate_label(rate)));
        }
    }
    Ok(report)
}

fn unique(values: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::new();
    for v in values {
        if !out.contains(&v) {
            out.push(v);
        }
    }
    out
}
