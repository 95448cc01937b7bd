//! Identifiability of the wiring and process groups from galvanostatic data:
//! synthetic observations, χ² landscapes and an affine-invariant ensemble sampler.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::analytic::LeanCell;
use crate::numerics::{linspace, logspace, nelder_mead};
use crate::output::{format_number, Csv};
use crate::scaling::DimensionlessGroups;
use crate::{Error, Result};

/// A fittable dimensionless group.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parameter {
    Wiring,
    Process,
}

impl Parameter {
    pub fn name(self) -> &'static str {
        match self {
            Parameter::Wiring => "da_w",
            Parameter::Process => "da_p",
        }
    }

    pub fn get(self, groups: &DimensionlessGroups) -> f64 {
        match self {
            Parameter::Wiring => groups.da_w,
            Parameter::Process => groups.da_p,
        }
    }

    pub fn set(self, groups: DimensionlessGroups, value: f64) -> DimensionlessGroups {
        match self {
            Parameter::Wiring => groups.with_wiring(value),
            Parameter::Process => groups.with_process(value),
        }
    }
}

/// Where synthetic noise enters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NoiseMode {
    /// Da_w and Da_p perturbed by (1 + σ·N(0,1)), drawn independently per point.
    #[default]
    Parameter,
    /// Gaussian voltage noise with the first-order propagated standard deviation.
    Observation,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthesisOptions {
    pub points: usize,
    pub noise_fraction: f64,
    /// Mean-filling interval sampled uniformly.
    pub filling_range: (f64, f64),
    pub mode: NoiseMode,
    pub seed: u64,
}

impl Default for SynthesisOptions {
    fn default() -> Self {
        SynthesisOptions {
            points: 100,
            noise_fraction: 0.05,
            filling_range: (0.1, 0.9),
            mode: NoiseMode::Parameter,
            seed: 0,
        }
    }
}

/// Voltage observations against mean filling (state of discharge).
#[derive(Debug, Clone, PartialEq)]
pub struct Observations {
    pub filling: Vec<f64>,
    pub voltage: Vec<f64>,
}

impl Observations {
    pub fn len(&self) -> usize {
        self.filling.len()
    }

    pub fn is_empty(&self) -> bool {
        self.filling.is_empty()
    }

    pub fn to_csv(&self) -> Csv {
        let mut csv = Csv::new(&["mean_filling", "voltage_volts"]);
        for (c, v) in self.filling.iter().zip(&self.voltage) {
            csv.push(&[*c, *v]);
        }
        csv
    }
}

fn voltages(cell: &LeanCell, fillings: &[f64]) -> Result<Vec<f64>> {
    fillings.iter().map(|&c| cell.cell_voltage(c)).collect()
}

/// First-order standard deviation of the voltage at each filling when Da_w and Da_p
/// carry independent relative noise `fraction`.
pub fn propagated_sigma(cell: &LeanCell, fillings: &[f64], fraction: f64) -> Result<Vec<f64>> {
    const H: f64 = 1e-5;
    let g = cell.groups;
    let shifted = |p: Parameter, factor: f64| cell.with_groups(p.set(g, p.get(&g) * factor));
    let mut sens = Vec::with_capacity(2);
    for p in [Parameter::Wiring, Parameter::Process] {
        let up = voltages(&shifted(p, H.exp()), fillings)?;
        let down = voltages(&shifted(p, (-H).exp()), fillings)?;
        sens.push(up.iter().zip(&down).map(|(u, d)| (u - d) / (2.0 * H)).collect::<Vec<f64>>());
    }
    Ok((0..fillings.len())
        .map(|i| fraction * sens[0][i].hypot(sens[1][i]))
        .collect())
}

/// Synthetic galvanostatic data from the analytic model at `cell.groups`.
pub fn synthesize_data(cell: &LeanCell, options: &SynthesisOptions) -> Result<Observations> {
    let (lo, hi) = options.filling_range;
    if options.points < 2 || !(lo < hi) {
        return Err(Error::invalid("filling_range", "need at least two points on a nonempty interval"));
    }
    if !(options.noise_fraction >= 0.0) {
        return Err(Error::invalid("noise_fraction", "must be nonnegative"));
    }
    let filling = linspace(lo, hi, options.points);
    let sigma = options.noise_fraction;
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let voltage = match options.mode {
        NoiseMode::Parameter => {
            let g = cell.groups;
            let mut out = Vec::with_capacity(filling.len());
            for &c in &filling {
                let ew: f64 = rng.sample(StandardNormal);
                let ep: f64 = rng.sample(StandardNormal);
                let groups = g
                    .with_wiring(g.da_w * (1.0 + sigma * ew).max(1e-3))
                    .with_process(g.da_p * (1.0 + sigma * ep).max(1e-3));
                out.push(cell.with_groups(groups).cell_voltage(c)?);
            }
            out
        }
        NoiseMode::Observation => {
            let clean = voltages(cell, &filling)?;
            let sd = propagated_sigma(cell, &filling, sigma)?;
            clean
                .iter()
                .zip(&sd)
                .map(|(v, s)| v + s * rng.sample::<f64, _>(StandardNormal))
                .collect()
        }
    };
    Ok(Observations { filling, voltage })
}

/// Least-squares problem for a subset of {Da_w, Da_p}.
#[derive(Debug, Clone)]
pub struct FitProblem<'a> {
    /// Model context; the free groups are overwritten during the fit.
    pub cell: LeanCell<'a>,
    pub free: Vec<Parameter>,
    pub observations: Observations,
    /// Voltage standard deviation per point, V.
    pub sigma: Vec<f64>,
    /// Multiplies χ²; 0 gives a flat likelihood.
    pub data_weight: f64,
    /// Uniform prior support for each free parameter (linear values).
    pub bounds: Vec<(f64, f64)>,
}

impl<'a> FitProblem<'a> {
    /// σ_V is the first-order propagation of `noise_fraction` at `cell.groups`. Prior
    /// bounds default to ×/÷ 10 of those groups.
    pub fn new(cell: LeanCell<'a>, observations: Observations, free: Vec<Parameter>, noise_fraction: f64) -> Result<Self> {
        if observations.len() < 10 || observations.voltage.len() != observations.len() {
            return Err(Error::invalid("observations", "need at least 10 matching points"));
        }
        if !(noise_fraction > 0.0) {
            return Err(Error::invalid("noise_fraction", "must be positive"));
        }
        if free.is_empty() || free.len() > 2 || (free.len() == 2 && free[0] == free[1]) {
            return Err(Error::invalid("free", "choose one or both of da_w, da_p"));
        }
        let sigma = propagated_sigma(&cell, &observations.filling, noise_fraction)?
            .into_iter()
            .map(|s| s.max(1e-9))
            .collect();
        let bounds = free
            .iter()
            .map(|p| {
                let v = p.get(&cell.groups);
                (v / 10.0, v * 10.0)
            })
            .collect();
        Ok(FitProblem {
            cell,
            free,
            observations,
            sigma,
            data_weight: 1.0,
            bounds,
        })
    }

    pub fn dim(&self) -> usize {
        self.free.len()
    }

    pub fn groups_for(&self, params: &[f64]) -> DimensionlessGroups {
        self.free
            .iter()
            .zip(params)
            .fold(self.cell.groups, |g, (p, &v)| p.set(g, v))
    }

    pub fn model(&self, params: &[f64]) -> Result<Vec<f64>> {
        if params.len() != self.dim() || params.iter().any(|v| !(*v > 0.0)) {
            return Err(Error::invalid("params", format!("expected {} positive values, got {params:?}", self.dim())));
        }
        voltages(&self.cell.with_groups(self.groups_for(params)), &self.observations.filling)
    }

    pub fn chi_square(&self, params: &[f64]) -> Result<f64> {
        let model = self.model(params)?;
        let sum: f64 = model
            .iter()
            .zip(&self.observations.voltage)
            .zip(&self.sigma)
            .map(|((m, o), s)| ((m - o) / s).powi(2))
            .sum();
        Ok(self.data_weight * sum)
    }

    /// Log posterior over log-parameters: −χ²/2 inside the prior box, −∞ outside or on
    /// model failure.
    pub fn log_posterior(&self, log_params: &[f64]) -> f64 {
        let inside = log_params
            .iter()
            .zip(&self.bounds)
            .all(|(x, (lo, hi))| *x >= lo.ln() && *x <= hi.ln());
        if !inside {
            return f64::NEG_INFINITY;
        }
        let params: Vec<f64> = log_params.iter().map(|x| x.exp()).collect();
        match self.chi_square(&params) {
            Ok(c) if c.is_finite() => -0.5 * c,
            _ => f64::NEG_INFINITY,
        }
    }
}

/// Coordinates in which a point estimate is searched.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coordinates {
    Linear,
    Log,
}

/// Minimum-χ² estimate by Nelder–Mead from `start` (linear values).
pub fn best_fit(problem: &FitProblem, start: &[f64], coordinates: Coordinates) -> Result<Vec<f64>> {
    let penalized = |params: &[f64]| problem.chi_square(params).unwrap_or(f64::INFINITY);
    match coordinates {
        Coordinates::Linear => {
            let scale: Vec<f64> = start.iter().map(|v| 0.05 * v).collect();
            nelder_mead(
                |x| if x.iter().all(|v| *v > 0.0) { penalized(x) } else { f64::INFINITY },
                start,
                &scale,
                1e-12,
                20_000,
            )
        }
        Coordinates::Log => {
            let x0: Vec<f64> = start.iter().map(|v| v.ln()).collect();
            let x = nelder_mead(
                |x| penalized(&x.iter().map(|v| v.exp()).collect::<Vec<_>>()),
                &x0,
                &vec![0.05; start.len()],
                1e-12,
                20_000,
            )?;
            Ok(x.iter().map(|v| v.exp()).collect())
        }
    }
}

/// Grid of (Da_w, Da_p) nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct LandscapeGrid {
    pub da_w: Vec<f64>,
    pub da_p: Vec<f64>,
}

impl LandscapeGrid {
    /// `n`×`n` logarithmic grid spanning ×/÷ `factor` around `center`. An odd `n`
    /// puts the center on a node.
    pub fn log_around(center: (f64, f64), factor: f64, n: usize) -> Result<Self> {
        if !(factor > 1.0) || n < 2 || !(center.0 > 0.0 && center.1 > 0.0) {
            return Err(Error::invalid("grid", "need factor > 1, n ≥ 2 and a positive center"));
        }
        Ok(LandscapeGrid {
            da_w: logspace(center.0 / factor, center.0 * factor, n),
            da_p: logspace(center.1 / factor, center.1 * factor, n),
        })
    }
}

/// χ² over a (Da_w, Da_p) grid, row-major in Da_w. Failed nodes hold NaN.
#[derive(Debug, Clone, PartialEq)]
pub struct Landscape {
    pub grid: LandscapeGrid,
    pub chi2: Vec<f64>,
    pub failed: usize,
    /// Node (Da_w index, Da_p index) of the smallest finite χ².
    pub argmin: Option<(usize, usize)>,
}

impl Landscape {
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.chi2[i * self.grid.da_p.len() + j]
    }

    pub fn argmin_values(&self) -> Option<(f64, f64)> {
        self.argmin.map(|(i, j)| (self.grid.da_w[i], self.grid.da_p[j]))
    }

    pub fn min_value(&self) -> Option<f64> {
        self.argmin.map(|(i, j)| self.at(i, j))
    }

    /// Mixed second difference ∂²χ²/∂lnDa_w∂lnDa_p at the argmin (interior only).
    /// Positive means the valley runs along the anti-correlated direction.
    pub fn mixed_curvature(&self) -> Option<f64> {
        let (i, j) = self.argmin?;
        if i == 0 || j == 0 || i + 1 >= self.grid.da_w.len() || j + 1 >= self.grid.da_p.len() {
            return None;
        }
        Some((self.at(i + 1, j + 1) - self.at(i + 1, j - 1) - self.at(i - 1, j + 1) + self.at(i - 1, j - 1)) / 4.0)
    }

    /// Matrix CSV: header row of Da_p values, one row per Da_w value.
    pub fn to_csv(&self) -> Csv {
        let mut header = vec!["da_w\\da_p".to_string()];
        header.extend(self.grid.da_p.iter().map(|&v| format_number(v)));
        let mut csv = Csv::new(&header);
        for (i, &w) in self.grid.da_w.iter().enumerate() {
            let mut row = vec![w];
            row.extend((0..self.grid.da_p.len()).map(|j| self.at(i, j)));
            csv.push(&row);
        }
        csv
    }
}

pub fn chi_square_landscape(problem: &FitProblem, grid: &LandscapeGrid) -> Result<Landscape> {
    if problem.free != [Parameter::Wiring, Parameter::Process] {
        return Err(Error::invalid("free", "the landscape needs free parameters [da_w, da_p] in that order"));
    }
    if grid.da_w.iter().chain(&grid.da_p).any(|v| !(*v > 0.0)) {
        return Err(Error::invalid("grid", "nodes must be positive"));
    }
    let np = grid.da_p.len();
    let chi2: Vec<f64> = (0..grid.da_w.len() * np)
        .into_par_iter()
        .map(|k| match problem.chi_square(&[grid.da_w[k / np], grid.da_p[k % np]]) {
            Ok(c) if c.is_finite() => c,
            _ => f64::NAN,
        })
        .collect();
    let failed = chi2.iter().filter(|c| c.is_nan()).count();
    let argmin = chi2
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_nan())
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(k, _)| (k / np, k % np));
    Ok(Landscape {
        grid: grid.clone(),
        chi2,
        failed,
        argmin,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McmcOptions {
    pub walkers: usize,
    pub steps: usize,
    /// Stretch-move scale a.
    pub stretch: f64,
    pub burn_in_fraction: f64,
    /// Standard deviation of the initial walker ball in log-parameters.
    pub init_spread: f64,
    pub min_acceptance: f64,
}

impl Default for McmcOptions {
    fn default() -> Self {
        McmcOptions {
            walkers: 32,
            steps: 2000,
            stretch: 2.0,
            burn_in_fraction: 0.25,
            init_spread: 0.01,
            min_acceptance: 0.01,
        }
    }
}

/// Post-burn-in ensemble chains.
#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorSample {
    pub dim: usize,
    pub walkers: usize,
    /// Number of retained steps.
    pub steps: usize,
    /// Steps discarded before the first retained one.
    pub burn_in: usize,
    /// Positions indexed (step, walker, coordinate).
    positions: Vec<f64>,
    log_prob: Vec<f64>,
    pub acceptance_rate: f64,
}

impl PosteriorSample {
    pub fn position(&self, step: usize, walker: usize) -> &[f64] {
        let k = (step * self.walkers + walker) * self.dim;
        &self.positions[k..k + self.dim]
    }

    pub fn log_prob(&self, step: usize, walker: usize) -> f64 {
        self.log_prob[step * self.walkers + walker]
    }

    /// All retained values of one coordinate.
    pub fn marginal(&self, coordinate: usize) -> Vec<f64> {
        self.positions.iter().skip(coordinate).step_by(self.dim).copied().collect()
    }

    pub fn median(&self, coordinate: usize) -> f64 {
        quantile(&self.marginal(coordinate), 0.5)
    }

    pub fn mean(&self, coordinate: usize) -> f64 {
        let m = self.marginal(coordinate);
        m.iter().sum::<f64>() / m.len() as f64
    }

    /// Integrated autocorrelation time of one coordinate in steps, from the
    /// walker-averaged autocorrelation function with a self-consistent window of 5τ.
    pub fn autocorrelation_time(&self, coordinate: usize) -> f64 {
        let n = self.steps;
        if n < 4 {
            return f64::NAN;
        }
        let max_lag = n / 2;
        let mut acf = vec![0.0; max_lag];
        for w in 0..self.walkers {
            let chain: Vec<f64> = (0..n).map(|s| self.position(s, w)[coordinate]).collect();
            let mean = chain.iter().sum::<f64>() / n as f64;
            let dev: Vec<f64> = chain.iter().map(|x| x - mean).collect();
            let var = dev.iter().map(|d| d * d).sum::<f64>() / n as f64;
            if var == 0.0 {
                continue;
            }
            for (lag, a) in acf.iter_mut().enumerate() {
                let c: f64 = dev[..n - lag].iter().zip(&dev[lag..]).map(|(x, y)| x * y).sum::<f64>() / n as f64;
                *a += c / var / self.walkers as f64;
            }
        }
        let mut tau = 1.0;
        for (m, a) in acf.iter().enumerate().skip(1) {
            tau += 2.0 * a;
            if m as f64 >= 5.0 * tau {
                break;
            }
        }
        tau
    }

    /// CSV `step,walker,<names...>,chi2` with χ² = −2 log p.
    pub fn to_csv(&self, names: &[&str]) -> Csv {
        let mut header = vec!["step".to_string(), "walker".to_string()];
        header.extend(names.iter().map(|n| n.to_string()));
        header.push("chi2".to_string());
        let mut csv = Csv::new(&header);
        for s in 0..self.steps {
            for w in 0..self.walkers {
                let mut fields = vec![(self.burn_in + s).to_string(), w.to_string()];
                fields.extend(self.position(s, w).iter().map(|&v| format_number(v)));
                fields.push(format_number(-2.0 * self.log_prob(s, w)));
                csv.push_fields(&fields);
            }
        }
        csv
    }
}

/// Sample quantile by linear interpolation between order statistics.
pub fn quantile(values: &[f64], q: f64) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let pos = q.clamp(0.0, 1.0) * (v.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = (lo + 1).min(v.len() - 1);
    v[lo] + (pos - lo as f64) * (v[hi] - v[lo])
}

/// Number of significant modes of a histogram with `bins` bins over the central 99%
/// of the samples. Two local peaks count separately only if the valley between them
/// is below the smaller peak by more than 10% of it and by three Poisson deviations.
pub fn histogram_modes(samples: &[f64], bins: usize) -> usize {
    if samples.is_empty() || bins == 0 {
        return 0;
    }
    let lo = quantile(samples, 0.005);
    let hi = quantile(samples, 0.995);
    if !(hi > lo) {
        return 1;
    }
    let mut counts = vec![0.0f64; bins];
    for &x in samples {
        if x >= lo && x <= hi {
            let b = (((x - lo) / (hi - lo)) * bins as f64) as usize;
            counts[b.min(bins - 1)] += 1.0;
        }
    }
    let mut modes = 1;
    let mut peak = 0;
    for b in 1..bins {
        if counts[b] > counts[peak] {
            peak = b;
        }
    }
    // Walk outward from the global peak; a new mode starts whenever the profile
    // climbs significantly above the lowest valley seen since the last mode.
    for dir in [-1isize, 1] {
        let mut ref_peak = counts[peak];
        let mut valley = counts[peak];
        let mut b = peak as isize + dir;
        while b >= 0 && (b as usize) < bins {
            let c = counts[b as usize];
            if c < valley {
                valley = c;
            }
            let smaller = c.min(ref_peak);
            let dip = smaller - valley;
            if dip > 0.1 * smaller && dip > 3.0 * smaller.sqrt() {
                modes += 1;
                ref_peak = c;
                valley = c;
            } else if c > ref_peak {
                ref_peak = c;
                valley = c;
            }
            b += dir;
        }
    }
    modes
}

/// Affine-invariant ensemble sampler with stretch moves. Random numbers for each
/// half-ensemble update are drawn serially in walker order before the proposals are
/// evaluated in parallel, so chains do not depend on the thread count.
pub fn ensemble_sampler<F>(log_prob: F, initial: Vec<Vec<f64>>, options: &McmcOptions, seed: u64) -> Result<PosteriorSample>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let walkers = initial.len();
    let dim = initial.first().map_or(0, |w| w.len());
    if dim == 0 || initial.iter().any(|w| w.len() != dim) {
        return Err(Error::invalid("initial", "walkers must share a nonzero dimension"));
    }
    if walkers < 2 * dim + 2 {
        return Err(Error::invalid("walkers", format!("need at least {} walkers, got {walkers}", 2 * dim + 2)));
    }
    if !(options.stretch > 1.0) {
        return Err(Error::invalid("stretch", "must exceed 1"));
    }
    if !(0.0..1.0).contains(&options.burn_in_fraction) || options.steps == 0 {
        return Err(Error::invalid("steps", "need steps > 0 and burn-in fraction in [0, 1)"));
    }
    let mut pos = initial;
    let mut lp: Vec<f64> = pos.par_iter().map(|x| log_prob(x)).collect();
    if let Some(k) = lp.iter().position(|v| !v.is_finite()) {
        return Err(Error::invalid("initial", format!("walker {k} starts where the log density is not finite")));
    }
    let a = options.stretch;
    let burn_in = ((options.steps as f64) * options.burn_in_fraction).floor() as usize;
    let kept = options.steps - burn_in;
    let mut positions = Vec::with_capacity(kept * walkers * dim);
    let mut log_probs = Vec::with_capacity(kept * walkers);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let half = walkers / 2;
    let mut accepted = 0usize;
    for step in 0..options.steps {
        for (active, other) in [(0..half, half..walkers), (half..walkers, 0..half)] {
            let draws: Vec<(usize, f64, f64)> = active
                .clone()
                .map(|_| {
                    let partner = other.start + rng.gen_range(0..other.len());
                    let u: f64 = rng.gen();
                    let z = ((a - 1.0) * u + 1.0).powi(2) / a;
                    let accept: f64 = rng.gen();
                    (partner, z, accept)
                })
                .collect();
            let proposals: Vec<Vec<f64>> = active
                .clone()
                .zip(&draws)
                .map(|(k, &(j, z, _))| pos[j].iter().zip(&pos[k]).map(|(xj, xk)| xj + z * (xk - xj)).collect())
                .collect();
            let lp_new: Vec<f64> = proposals.par_iter().map(|y| log_prob(y)).collect();
            for ((k, proposal), (&(_, z, u), &lq)) in active.clone().zip(proposals).zip(draws.iter().zip(&lp_new)) {
                let log_ratio = (dim as f64 - 1.0) * z.ln() + lq - lp[k];
                if lq.is_finite() && u.ln() < log_ratio {
                    pos[k] = proposal;
                    lp[k] = lq;
                    accepted += 1;
                }
            }
        }
        if step >= burn_in {
            for (x, l) in pos.iter().zip(&lp) {
                positions.extend_from_slice(x);
                log_probs.push(*l);
            }
        }
    }
    let acceptance_rate = accepted as f64 / (options.steps * walkers) as f64;
    if acceptance_rate < options.min_acceptance {
        return Err(Error::numerical(
            "ensemble sampler",
            format!("walkers stuck: acceptance {acceptance_rate:.4} below {}", options.min_acceptance),
        ));
    }
    Ok(PosteriorSample {
        dim,
        walkers,
        steps: kept,
        burn_in,
        positions,
        log_prob: log_probs,
        acceptance_rate,
    })
}

/// Posterior over the log of the free groups, walkers started in a Gaussian ball
/// around `start` (linear values), clipped into the prior box.
pub fn ensemble_mcmc(problem: &FitProblem, start: &[f64], options: &McmcOptions, seed: u64) -> Result<PosteriorSample> {
    if start.len() != problem.dim() || start.iter().any(|v| !(*v > 0.0)) {
        return Err(Error::invalid("start", "need one positive value per free parameter"));
    }
    // Stream 1 seeds the walker ball; the sampler uses stream 0 of the same seed.
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    let initial = (0..options.walkers)
        .map(|_| {
            start
                .iter()
                .zip(&problem.bounds)
                .map(|(v, (lo, hi))| {
                    let x = v.ln() + options.init_spread * rng.sample::<f64, _>(StandardNormal);
                    x.clamp(lo.ln(), hi.ln())
                })
                .collect()
        })
        .collect();
    ensemble_sampler(|x| problem.log_posterior(x), initial, options, seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantile_interpolates() {
        assert_eq!(quantile(&[3.0, 1.0, 2.0], 0.5), 2.0);
        assert_eq!(quantile(&[0.0, 1.0], 0.25), 0.25);
    }

    #[test]
    fn histogram_modes_separates_two_bumps() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let one: Vec<f64> = (0..20_000).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let two: Vec<f64> = one.iter().enumerate().map(|(k, x)| x + if k % 2 == 0 { -4.0 } else { 4.0 }).collect();
        assert_eq!(histogram_modes(&one, 20), 1);
        assert_eq!(histogram_modes(&two, 20), 2);
    }

    #[test]
    fn sampler_rejects_small_ensembles() {
        let init = vec![vec![0.0, 0.0]; 4];
        assert!(ensemble_sampler(|_| 0.0, init, &McmcOptions::default(), 0).is_err());
    }
}
