use approx::assert_relative_eq;
use lean_pet::analytic::LeanCell;
use lean_pet::inference::{
    best_fit, chi_square_landscape, ensemble_mcmc, ensemble_sampler, propagated_sigma, synthesize_data, Coordinates,
    FitProblem, LandscapeGrid, McmcOptions, NoiseMode, Parameter, SynthesisOptions,
};
use lean_pet::kinetics::{KineticsSpec, OcpCurve};
use lean_pet::scaling::{compute_groups, PhysicalCellParams};

struct Fixture {
    params: PhysicalCellParams,
    kinetics: KineticsSpec,
    ocp: OcpCurve,
}

impl Fixture {
    fn new() -> Self {
        Fixture {
            params: PhysicalCellParams::nmc532(),
            kinetics: KineticsSpec::nmc532(),
            ocp: OcpCurve::nmc532(),
        }
    }

    fn cell(&self) -> LeanCell<'_> {
        let groups = compute_groups(&self.params, 3600.0, self.kinetics.j0).unwrap();
        LeanCell::new(groups, &self.kinetics, &self.ocp, self.params.thermal_voltage())
    }
}

const BOTH: [Parameter; 2] = [Parameter::Wiring, Parameter::Process];

fn noiseless(cell: &LeanCell) -> lean_pet::inference::Observations {
    synthesize_data(
        cell,
        &SynthesisOptions {
            noise_fraction: 0.0,
            points: 40,
            ..SynthesisOptions::default()
        },
    )
    .unwrap()
}

#[test]
fn synthesis_is_reproducible() {
    let fx = Fixture::new();
    let cell = fx.cell();
    let opts = SynthesisOptions {
        seed: 11,
        ..SynthesisOptions::default()
    };
    let a = synthesize_data(&cell, &opts).unwrap();
    let b = synthesize_data(&cell, &opts).unwrap();
    assert_eq!(a.voltage, b.voltage);
    let c = synthesize_data(&cell, &SynthesisOptions { seed: 12, ..opts }).unwrap();
    assert_ne!(a.voltage, c.voltage);
}

#[test]
fn zero_noise_reproduces_the_model() {
    let fx = Fixture::new();
    let cell = fx.cell();
    for mode in [NoiseMode::Parameter, NoiseMode::Observation] {
        let obs = synthesize_data(
            &cell,
            &SynthesisOptions {
                noise_fraction: 0.0,
                mode,
                ..SynthesisOptions::default()
            },
        )
        .unwrap();
        for (c, v) in obs.filling.iter().zip(&obs.voltage) {
            assert_relative_eq!(*v, cell.cell_voltage(*c).unwrap(), epsilon = 1e-12);
        }
    }
    let problem = FitProblem::new(cell, noiseless(&cell), BOTH.to_vec(), 0.05).unwrap();
    let truth = [cell.groups.da_w, cell.groups.da_p];
    assert!(problem.chi_square(&truth).unwrap() < 1e-18);
}

/// Sample variance of the synthetic voltage at every filling against the propagated σ².
fn variance_ratio(mode: NoiseMode) -> (f64, f64) {
    let fx = Fixture::new();
    let cell = fx.cell();
    let draws = 2000;
    let base = SynthesisOptions {
        points: 9,
        mode,
        ..SynthesisOptions::default()
    };
    let runs: Vec<Vec<f64>> = (0..draws)
        .map(|seed| synthesize_data(&cell, &SynthesisOptions { seed, ..base }).unwrap().voltage)
        .collect();
    let filling = synthesize_data(&cell, &base).unwrap().filling;
    let sigma = propagated_sigma(&cell, &filling, base.noise_fraction).unwrap();
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    for (i, s) in sigma.iter().enumerate() {
        let mean = runs.iter().map(|r| r[i]).sum::<f64>() / draws as f64;
        let var = runs.iter().map(|r| (r[i] - mean).powi(2)).sum::<f64>() / (draws - 1) as f64;
        let ratio = var / (s * s);
        lo = lo.min(ratio);
        hi = hi.max(ratio);
    }
    (lo, hi)
}

#[test]
fn observation_noise_has_the_propagated_variance() {
    let (lo, hi) = variance_ratio(NoiseMode::Observation);
    assert!(lo > 0.8 && hi < 1.2, "variance ratio in [{lo}, {hi}]");
}

#[test]
fn parameter_noise_matches_first_order_propagation() {
    let (lo, hi) = variance_ratio(NoiseMode::Parameter);
    assert!(lo > 0.8 && hi < 1.2, "variance ratio in [{lo}, {hi}]");
}

#[test]
fn point_estimates_agree_across_coordinates() {
    let fx = Fixture::new();
    let cell = fx.cell();
    let truth = [cell.groups.da_w, cell.groups.da_p];
    let start = [truth[0] * 1.3, truth[1] * 0.8];

    let clean = FitProblem::new(cell, noiseless(&cell), BOTH.to_vec(), 0.05).unwrap();
    let fit = best_fit(&clean, &start, Coordinates::Log).unwrap();
    assert_relative_eq!(fit[0], truth[0], max_relative = 1e-3);
    assert_relative_eq!(fit[1], truth[1], max_relative = 1e-3);

    let obs = synthesize_data(&cell, &SynthesisOptions { seed: 3, ..SynthesisOptions::default() }).unwrap();
    let noisy = FitProblem::new(cell, obs, BOTH.to_vec(), 0.05).unwrap();
    let log = best_fit(&noisy, &start, Coordinates::Log).unwrap();
    let linear = best_fit(&noisy, &start, Coordinates::Linear).unwrap();
    for k in 0..2 {
        assert_relative_eq!(log[k], linear[k], max_relative = 0.02);
    }
}

#[test]
fn landscape_of_clean_data_bottoms_out_at_truth() {
    let fx = Fixture::new();
    let cell = fx.cell();
    let problem = FitProblem::new(cell, noiseless(&cell), BOTH.to_vec(), 0.05).unwrap();
    let grid = LandscapeGrid::log_around((cell.groups.da_w, cell.groups.da_p), 4.0, 21).unwrap();
    let land = chi_square_landscape(&problem, &grid).unwrap();
    assert_eq!(land.failed, 0);
    assert_eq!(land.argmin, Some((10, 10)));
    assert!(land.min_value().unwrap() < 1e-12);
    let csv = land.to_csv();
    assert_eq!(csv.len(), 21);

    let single = FitProblem::new(cell, noiseless(&cell), vec![Parameter::Process], 0.05).unwrap();
    assert!(chi_square_landscape(&single, &grid).is_err());
}

#[test]
fn fit_problem_rejects_bad_input() {
    let fx = Fixture::new();
    let cell = fx.cell();
    let few = synthesize_data(&cell, &SynthesisOptions { points: 5, ..SynthesisOptions::default() }).unwrap();
    assert!(FitProblem::new(cell, few, BOTH.to_vec(), 0.05).is_err());
    assert!(FitProblem::new(cell, noiseless(&cell), BOTH.to_vec(), 0.0).is_err());
    assert!(FitProblem::new(cell, noiseless(&cell), vec![Parameter::Wiring, Parameter::Wiring], 0.05).is_err());
}

fn gaussian_log_density(x: &[f64]) -> f64 {
    // Mean (1, −2), unit variances, correlation 0.8.
    let (u, v) = (x[0] - 1.0, x[1] + 2.0);
    let rho: f64 = 0.8;
    -0.5 * (u * u - 2.0 * rho * u * v + v * v) / (1.0 - rho * rho)
}

fn gaussian_start(seed: u64) -> Vec<Vec<f64>> {
    (0..20)
        .map(|k| {
            let t = (k as f64 + seed as f64 * 0.1) * 0.37;
            vec![1.0 + 0.1 * t.sin(), -2.0 + 0.1 * t.cos()]
        })
        .collect()
}

#[test]
fn sampler_recovers_a_correlated_gaussian() {
    let opts = McmcOptions {
        walkers: 20,
        steps: 4000,
        ..McmcOptions::default()
    };
    let post = ensemble_sampler(gaussian_log_density, gaussian_start(0), &opts, 5).unwrap();
    let n = (post.steps * post.walkers) as f64;
    for (k, mean) in [(0, 1.0), (1, -2.0)] {
        let tau = post.autocorrelation_time(k).max(1.0);
        let se = (tau * post.walkers as f64 / n).sqrt();
        let m = post.mean(k);
        assert!((m - mean).abs() < 3.0 * se, "mean {k}: {m} vs {mean} (se {se})");
    }
    let (m0, m1) = (post.mean(0), post.mean(1));
    let (x, y) = (post.marginal(0), post.marginal(1));
    let var0 = x.iter().map(|v| (v - m0).powi(2)).sum::<f64>() / n;
    let var1 = y.iter().map(|v| (v - m1).powi(2)).sum::<f64>() / n;
    let cov = x.iter().zip(&y).map(|(a, b)| (a - m0) * (b - m1)).sum::<f64>() / n;
    assert_relative_eq!(var0, 1.0, max_relative = 0.15);
    assert_relative_eq!(var1, 1.0, max_relative = 0.15);
    assert_relative_eq!(cov / (var0 * var1).sqrt(), 0.8, epsilon = 0.05);
}

#[test]
fn sampler_is_independent_of_thread_count() {
    let opts = McmcOptions {
        walkers: 20,
        steps: 200,
        ..McmcOptions::default()
    };
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| ensemble_sampler(gaussian_log_density, gaussian_start(0), &opts, 9).unwrap())
    };
    let (a, b) = (run(1), run(4));
    for step in 0..a.steps {
        for w in 0..a.walkers {
            assert_eq!(a.position(step, w), b.position(step, w));
        }
    }
}

#[test]
fn sampler_needs_enough_walkers() {
    let opts = McmcOptions::default();
    let too_few = gaussian_start(0).into_iter().take(5).collect();
    assert!(ensemble_sampler(gaussian_log_density, too_few, &opts, 0).is_err());
}

#[test]
fn flat_likelihood_samples_the_prior() {
    let fx = Fixture::new();
    let cell = fx.cell();
    let mut problem = FitProblem::new(cell, noiseless(&cell), BOTH.to_vec(), 0.05).unwrap();
    problem.data_weight = 0.0;
    let opts = McmcOptions {
        steps: 3000,
        init_spread: 0.5,
        ..McmcOptions::default()
    };
    let post = ensemble_mcmc(&problem, &[cell.groups.da_w, cell.groups.da_p], &opts, 2).unwrap();
    for k in 0..2 {
        let (lo, hi) = (problem.bounds[k].0.ln(), problem.bounds[k].1.ln());
        let mut xs = post.marginal(k);
        xs.sort_by(f64::total_cmp);
        let n = xs.len() as f64;
        let ks = xs
            .iter()
            .enumerate()
            .map(|(i, x)| {
                let cdf = (x - lo) / (hi - lo);
                (cdf - i as f64 / n).abs().max((cdf - (i + 1) as f64 / n).abs())
            })
            .fold(0.0, f64::max);
        assert!(ks < 0.05, "coordinate {k}: KS distance {ks}");
    }
}
