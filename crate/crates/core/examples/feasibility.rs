//! Physical scales needed to see self-gravity in a double-slit experiment.
//!
//! Run with `cargo run --release --example feasibility`.

use sn_interference::units::{feasibility_report, Quantity, ScaleSystem};

fn main() -> sn_interference::Result<()> {
    let reference = ScaleSystem::new(1.112e-9)?;
    println!(
        "sigma_r = 1.112 nm  ->  m_r = {:.3e} u, t_r = {:.3} s",
        reference.m_r_in_u(),
        reference.t_r()
    );

    println!("\nparticle mass      sigma_r        slit separation   time for t~ = 8");
    for u in [16e9, 1e9, 1e8] {
        let r = feasibility_report(Quantity::atomic_mass_units(u), 0.5, 8.0)?;
        println!(
            "{:>10.2e} u   {:>10.3e} m   {:>12.3e} m   {:>12.3e} s",
            r.mass_u(),
            r.sigma_r(),
            r.slit_separation,
            r.evolution_time
        );
    }
    Ok(())
}
