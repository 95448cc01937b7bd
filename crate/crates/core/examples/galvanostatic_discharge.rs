//! Closed-form constant-current discharge curves and the overpotential profile
//! across the electrode.

use lean_pet::analytic::{simulate_discharge, validity_over, LeanCell};
use lean_pet::kinetics::{KineticsSpec, OcpCurve};
use lean_pet::scaling::{compute_groups, process_time, PhysicalCellParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let params = PhysicalCellParams::nmc532();
    let kinetics = KineticsSpec::nmc532();
    let ocp = OcpCurve::nmc532();

    for rate in [0.5, 1.0, 2.0] {
        let groups = compute_groups(&params, process_time(rate), kinetics.j0)?;
        let cell = LeanCell::new(groups, &kinetics, &ocp, params.thermal_voltage());
        let sol = simulate_discharge(&cell, 0.1, 3.0, 200, 0)?;
        let validity = validity_over(&cell, &sol.mean_filling)?;
        println!(
            "{rate}C: {} points, ends at filling {:.3} ({:?}), worst validity ratio {:.3}",
            sol.times.len(),
            sol.mean_filling.last().copied().unwrap_or(f64::NAN),
            sol.termination,
            validity.ratio
        );
        for c in [0.2, 0.4, 0.6, 0.8] {
            println!("    filling {c:.1}: V = {:.4} V (OCP {:.4} V)", cell.cell_voltage(c)?, ocp.ocp(c)?);
        }
    }

    let cell = LeanCell::new(compute_groups(&params, 3600.0, kinetics.j0)?, &kinetics, &ocp, params.thermal_voltage());
    let profile = cell.profile(0.5)?;
    println!("\n1C overpotential profile at half filling (Λ = {:.3}):", profile.lambda);
    for (k, eta) in profile.samples(6).iter().enumerate() {
        let x = k as f64 / 5.0;
        println!("    x = {x:.1}: η = {:+.4} ({:+.2} mV)", eta, eta * cell.thermal_voltage * 1e3);
    }
    Ok(())
}
