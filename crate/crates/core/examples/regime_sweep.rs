//! Where the lean model holds: analytic-vs-nonlinear RMSE over C-rate, solid
//! conductivity and electrolyte concentration, next to the validity bound.

use lean_pet::config::{AxisKind, RunConfig, SweepAxis};
use lean_pet::protocols::sweep_points;

fn main() {
    let config = RunConfig::baseline();
    let axes = [
        SweepAxis { kind: AxisKind::Rate, values: vec![0.5, 1.0, 2.0] },
        SweepAxis { kind: AxisKind::SolidConductivity, values: vec![0.01, 0.1, 1.0] },
        SweepAxis { kind: AxisKind::ElectrolyteConcentration, values: vec![500.0, 1000.0, 2000.0] },
    ];
    println!("{:>5} {:>7} {:>7} {:>10} {:>8} {:>8}", "rate", "σ_s", "c_l", "RMSE (mV)", "ratio", "region");
    for p in sweep_points(&config, &axes) {
        println!(
            "{:>4}C {:>7} {:>7} {:>10.1} {:>8.3} {:>8}",
            p.rate,
            p.solid_conductivity,
            p.electrolyte_concentration,
            p.rmse * 1e3,
            p.validity_ratio,
            if p.in_region() { "inside" } else { "outside" }
        );
    }
}
