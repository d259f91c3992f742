//! Gravity-off and gravity-on evolution of the same state, compared at t~ = 8.9.
//!
//! Run with `cargo run --release --example free_vs_gravity -- 0.5`.

use sn_interference::analysis::{fringe_metrics, DEFAULT_MIN_PROMINENCE, DEFAULT_T_EVAL};
use sn_interference::lattice::{prepare_double_gaussian, Lattice, SetupParams};
use sn_interference::propagator::{evolve, StepScheme};

fn main() -> sn_interference::Result<()> {
    let m: f64 = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(0.5);
    let lattice = Lattice::standard();
    println!("m~ = {m}, lattice {} nodes on [{}, {}]", lattice.n_points(), lattice.x_min(), lattice.x_max());
    for gravity in [false, true] {
        let params = SetupParams::with_mass(m, gravity);
        let psi0 = prepare_double_gaussian(&lattice, &params)?;
        let record = evolve(&psi0, &params, &lattice, &StepScheme::frozen(), &[DEFAULT_T_EVAL])?;
        let rho = record.snapshot_at(DEFAULT_T_EVAL).expect("requested snapshot").density();
        let metrics = fringe_metrics(&rho, &lattice, DEFAULT_MIN_PROMINENCE)?;
        println!(
            "gravity {:<3}  w = {:<10} visibility = {:.3}  peaks = {}  rms spread = {:.3}",
            if gravity { "on" } else { "off" },
            metrics.w.map(|w| format!("{w:.4}")).unwrap_or_else(|| "none".into()),
            metrics.visibility,
            metrics.peak_count,
            metrics.rms_spread
        );
    }
    Ok(())
}
