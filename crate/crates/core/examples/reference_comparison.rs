//! The analytic discharge against the finite-volume solvers: the full nonlinear model
//! and the discretized lean equations, whose gap is pure discretization error.

use std::time::Instant;

use lean_pet::analytic::{simulate_discharge, LeanCell};
use lean_pet::kinetics::{KineticsSpec, OcpCurve};
use lean_pet::refsolver::{rmse, solve_lean, solve_nonlinear, Grid1D, LeanOptions, NonlinearOptions, Protocol};
use lean_pet::scaling::{compute_groups, process_time, PhysicalCellParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let params = PhysicalCellParams::nmc532();
    let kinetics = KineticsSpec::nmc532();
    let ocp = OcpCurve::nmc532();

    println!("analytic vs nonlinear finite volumes (50 cells):");
    for rate in [0.5, 1.0, 2.0] {
        let t_p = process_time(rate);
        let cell = LeanCell::new(compute_groups(&params, t_p, kinetics.j0)?, &kinetics, &ocp, params.thermal_voltage());
        let analytic = simulate_discharge(&cell, 0.1, 3.0, 400, 0)?;
        let mut opts = NonlinearOptions::new(Grid1D::new(50)?, 1.0, 2.0 * t_p);
        opts.cutoff = Some(3.0);
        let start = Instant::now();
        let reference = solve_nonlinear(
            &params,
            &kinetics,
            &ocp,
            Protocol::ConstantCurrent {
                current: params.c_rate_current(rate),
            },
            0.1,
            &opts,
        )?;
        println!(
            "  {rate}C: RMSE {:.1} mV, {} steps in {:.2?}",
            rmse(&analytic.curve(), &reference.curve())? * 1e3,
            reference.times.len(),
            start.elapsed()
        );
    }

    println!("\nanalytic vs discretized lean equations (1C, no electrolyte polarization):");
    let mut groups = compute_groups(&params, 3600.0, kinetics.j0)?;
    groups.da = 0.0;
    let cell = LeanCell::new(groups, &kinetics, &ocp, params.thermal_voltage());
    for n in [50, 100, 200] {
        let mut opts = LeanOptions::new(Grid1D::new(n)?, 0.01, 0.85);
        opts.electrolyte_coupling = false;
        opts.transient_electrolyte = false;
        opts.capacitance = false;
        let sol = solve_lean(&cell, Protocol::ConstantCurrent { current: 1.0 }, 0.1, &opts)?;
        let err = sol
            .mean_filling
            .iter()
            .zip(&sol.voltage)
            .map(|(&c, &v)| Ok((cell.cell_voltage(c)? - v).powi(2)))
            .sum::<lean_pet::Result<f64>>()?;
        println!("  n = {n:>3}: RMSE {:.3e} V", (err / sol.voltage.len() as f64).sqrt());
    }
    Ok(())
}
