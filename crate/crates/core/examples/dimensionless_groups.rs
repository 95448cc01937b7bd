//! Dimensionless groups of the baseline cell and how they move with C-rate and
//! conductivity.

use lean_pet::kinetics::KineticsSpec;
use lean_pet::scaling::{compute_groups, compute_small_signal_groups, effective_conductivity, process_time, PhysicalCellParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let params = PhysicalCellParams::nmc532();
    let kinetics = KineticsSpec::nmc532();

    println!("specific area a_p     = {:.4e} 1/m", params.specific_area());
    println!("areal capacity        = {:.4e} C/m2", params.areal_capacity());
    println!("1C current density    = {:.4} A/m2", params.c_rate_current(1.0));

    println!("\n{:>6} {:>10} {:>10} {:>10} {:>10} {:>10} {:>12} {:>10}", "rate", "Da", "Da_p", "Da_w", "Da_w,s", "Da_w,k", "Da_c", "tau_l");
    for rate in [0.5, 1.0, 2.0] {
        let g = compute_groups(&params, process_time(rate), kinetics.j0)?;
        println!(
            "{:>5}C {:>10.4} {:>10.4} {:>10.4} {:>10.4} {:>10.4} {:>12.4e} {:>10.5}",
            rate, g.da, g.da_p, g.da_w, g.da_w_sigma, g.da_w_kappa, g.da_c, g.tau_l
        );
    }

    let g = compute_groups(&params, 3600.0, kinetics.j0)?;
    let sigma_eff = effective_conductivity(&params, g.da, kinetics.j0)?;
    println!("\nseries conductivity σ_eff = {sigma_eff:.4e} S/m");

    println!("\nwiring group against solid conductivity (1C):");
    for sigma in [0.01, 0.1, 1.0, 10.0] {
        let p = PhysicalCellParams {
            solid_conductivity: sigma,
            ..params.clone()
        };
        let g = compute_groups(&p, 3600.0, kinetics.j0)?;
        println!("  σ_s = {sigma:>5} S/m  Da_w = {:>9.3}  electronic share {:.3}", g.da_w, g.electronic_share());
    }

    let s = compute_small_signal_groups(&params, kinetics.j0)?;
    println!("\nsmall-signal groups (t_p = 1 s): Da_w = {:.4}, Da_p = {:.4e}, Da_c = {:.4}", s.da_w, s.da_p, s.da_c);
    Ok(())
}
