//! Analytic impedance spectrum at rest, its charge-transfer arc, and how the arc moves
//! when the solid conductivity or the kinetic prefactor is halved.

use std::f64::consts::TAU;

use lean_pet::analytic::{arc_features, frequency_grid, ImpedanceModel};
use lean_pet::kinetics::{KineticsSpec, OcpCurve};
use lean_pet::scaling::PhysicalCellParams;

fn arc(params: &PhysicalCellParams, kinetics: &KineticsSpec, ocp: &OcpCurve) -> Result<(f64, f64), Box<dyn std::error::Error>> {
    let model = ImpedanceModel::at_rest(params, kinetics, ocp, 0.5)?;
    let omegas: Vec<f64> = frequency_grid(1e-3, 1e4, 40).iter().map(|f| f * TAU).collect();
    let a = arc_features(&model.spectrum(&omegas)?).ok_or("no arc found")?;
    Ok((a.diameter(), a.apex_hz))
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let params = PhysicalCellParams::nmc532();
    let kinetics = KineticsSpec::nmc532();
    let ocp = OcpCurve::nmc532();

    let model = ImpedanceModel::at_rest(&params, &kinetics, &ocp, 0.5)?;
    println!("{:>10} {:>14} {:>14} {:>9}", "f (Hz)", "Re Z (ohm m2)", "-Im Z", "phase");
    let omegas: Vec<f64> = frequency_grid(1e-2, 1e3, 2).iter().map(|f| f * TAU).collect();
    for p in model.spectrum(&omegas)? {
        println!("{:>10.3e} {:>14.5e} {:>14.5e} {:>8.2}°", p.frequency_hz(), p.z.re, -p.z.im, p.phase_degrees());
    }

    let (d0, f0) = arc(&params, &kinetics, &ocp)?;
    let half_sigma = PhysicalCellParams {
        solid_conductivity: params.solid_conductivity / 2.0,
        ..params.clone()
    };
    let (d1, f1) = arc(&half_sigma, &kinetics, &ocp)?;
    let half_j0 = KineticsSpec {
        j0: kinetics.j0 / 2.0,
        ..kinetics
    };
    let (d2, f2) = arc(&params, &half_j0, &ocp)?;
    println!("\narc diameter and apex frequency");
    println!("  baseline   {d0:.4e} ohm m2 at {f0:7.3} Hz");
    println!("  σ_s / 2    {d1:.4e} ohm m2 at {f1:7.3} Hz");
    println!("  j0 / 2     {d2:.4e} ohm m2 at {f2:7.3} Hz (apex shift ×{:.2})", f0 / f2);
    Ok(())
}
