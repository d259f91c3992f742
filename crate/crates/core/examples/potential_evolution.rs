//! The self-gravitational potential at a few times, written as CSV to stdout.
//!
//! Run with `cargo run --release --example potential_evolution > potential.csv`.

use sn_interference::lattice::{prepare_double_gaussian, Lattice, SetupParams};
use sn_interference::output::num;
use sn_interference::propagator::{evolve, StepScheme};

fn main() -> sn_interference::Result<()> {
    let lattice = Lattice::standard();
    let params = SetupParams::with_mass(0.5, true);
    let psi0 = prepare_double_gaussian(&lattice, &params)?;
    let times = [0.0, 2.0, 4.0, 6.0, 8.9];
    let record = evolve(&psi0, &params, &lattice, &StepScheme::predictor_corrector(2), &times)?;

    let potentials: Vec<Vec<f64>> = record
        .snapshots
        .iter()
        .map(|s| s.potential.as_ref().expect("gravity is on").values.clone())
        .collect();
    let header: Vec<String> = times.iter().map(|t| format!("V(t={t})")).collect();
    println!("x,{}", header.join(","));
    for i in (0..lattice.n_points()).step_by(5) {
        let row: Vec<String> = potentials.iter().map(|v| num(v[i])).collect();
        println!("{},{}", num(lattice.x(i)), row.join(","));
    }
    eprintln!("energy drift over the run: {:.2e}", record.max_relative_energy_drift());
    Ok(())
}
