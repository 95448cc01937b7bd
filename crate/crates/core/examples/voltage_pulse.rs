//! Current transients after a potentiostatic step: the linearized exponential against
//! direct integration of the mean-filling equation.

use lean_pet::analytic::{pulse_current, LeanCell, PulseOptions};
use lean_pet::kinetics::{KineticsSpec, OcpCurve};
use lean_pet::scaling::{compute_groups, PhysicalCellParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let params = PhysicalCellParams::nmc532();
    let kinetics = KineticsSpec::nmc532();
    let ocp = OcpCurve::nmc532();
    let groups = compute_groups(&params, 3600.0, kinetics.j0)?;
    let cell = LeanCell::new(groups, &kinetics, &ocp, params.thermal_voltage());
    let scale = params.areal_capacity() / groups.t_p;
    let rest = ocp.ocp(0.5)?;

    for mv in [25.0, 50.0, 100.0] {
        let applied = rest - mv * 1e-3;
        let probe = pulse_current(&cell, 0.5, applied, 1.0, PulseOptions { points: 2, nonlinear: false })?;
        let duration = 5.0 / probe.rate.abs();
        let linear = pulse_current(&cell, 0.5, applied, duration, PulseOptions::default())?;
        let exact = pulse_current(&cell, 0.5, applied, duration, PulseOptions { nonlinear: true, ..PulseOptions::default() })?;
        let peak = exact.current.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let rmse = (linear.current.iter().zip(&exact.current).map(|(a, b)| (a - b).powi(2)).sum::<f64>()
            / linear.current.len() as f64)
            .sqrt();
        println!(
            "{mv:>5} mV: time constant {:6.1} s, initial current {:.3} A/m2, relative RMSE {:.4}",
            groups.t_p / probe.rate.abs(),
            linear.current[0] * scale,
            rmse / peak
        );
    }
    Ok(())
}
