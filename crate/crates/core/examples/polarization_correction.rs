//! First-order correction for electrolyte polarization: salt depletion across the
//! electrode and its effect on the discharge voltage at 2C.

use lean_pet::analytic::{polarization_correction, LeanCell};
use lean_pet::kinetics::{KineticsSpec, OcpCurve};
use lean_pet::scaling::{compute_groups, PhysicalCellParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let params = PhysicalCellParams::nmc532();
    let kinetics = KineticsSpec::nmc532();
    let ocp = OcpCurve::nmc532();
    let groups = compute_groups(&params, 1800.0, kinetics.j0)?;
    let cell = LeanCell::new(groups, &kinetics, &ocp, params.thermal_voltage());

    println!("{:>8} {:>10} {:>12} {:>10}", "filling", "base (V)", "corrected", "Λ");
    for c in [0.2, 0.4, 0.6, 0.8, 0.9] {
        let corr = polarization_correction(&cell, c)?;
        println!("{c:>8.2} {:>10.4} {:>12.4} {:>10.3}", cell.cell_voltage(c)?, corr.voltage, corr.eta.lambda);
    }

    let corr = polarization_correction(&cell, 0.5)?;
    if corr.regime_warning {
        println!("\nnote: Da exceeds Da_w, the correction is outside its intended regime");
    }
    println!("\nelectrolyte deviation δc_l at half filling (c_l = 1 − δc_l):");
    for k in 0..=5 {
        let x = k as f64 / 5.0;
        println!("    x = {x:.1}: δc_l = {:+.4}", corr.electrolyte_deviation(x));
    }
    Ok(())
}
