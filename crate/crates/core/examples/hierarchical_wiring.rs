//! Effective wiring group of an electrode built from porous secondary particles, across
//! the range from fast to slow intra-secondary transport.

use lean_pet::analytic::{hierarchical_wiring, HierarchicalSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let da_w = 63.3;
    let f = 0.3;
    println!("{:>10} {:>12} {:>12} {:>14}", "Da_w^sp f", "Da'_w", "Da'_w f", "3 sqrt(f/sp)Da_w");
    for x2 in [1e-4, 1e-3, 1e-2, 0.1, 1.0, 10.0, 100.0, 1e3] {
        let spec = HierarchicalSpec {
            secondary_radius: 5e-6,
            secondary_porosity: 0.3,
            secondary_specific_area: 1e6,
            da_sp: 0.0,
            da_w_sp: x2 / f,
            da_p_sp: 0.0,
        };
        let h = hierarchical_wiring(&spec, da_w, f)?;
        println!(
            "{x2:>10.0e} {:>12.4} {:>12.4} {:>14.4}",
            h.da_w_prime,
            h.effective_rate,
            3.0 * da_w * (f / spec.da_w_sp).sqrt()
        );
    }
    Ok(())
}
