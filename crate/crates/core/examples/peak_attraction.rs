//! Long run at m~ = 0.7: the two lobes fall together and merge into one peak.
//!
//! Run with `cargo run --release --example peak_attraction`.

use sn_interference::analysis::{attraction_series, DEFAULT_MIN_PROMINENCE};
use sn_interference::lattice::{prepare_double_gaussian, Lattice, SetupParams};
use sn_interference::propagator::{Evolution, StepScheme};

fn main() -> sn_interference::Result<()> {
    let lattice = Lattice::new(-105.0, 105.0, 3001, 150.0, 15_000)?;
    let params = SetupParams::with_mass(0.7, true);
    let psi0 = prepare_double_gaussian(&lattice, &params)?;
    let times: Vec<f64> = (0..=30).map(|k| 5.0 * k as f64).collect();
    let record = Evolution::new(params, lattice, StepScheme::frozen()).run(&psi0, &times)?;
    let series = attraction_series(&record, DEFAULT_MIN_PROMINENCE)?;

    println!("   t~   peaks  separation  rms spread");
    for p in &series.points {
        println!("{:6.1} {:6} {:11.3} {:11.3}", p.t_tilde, p.peak_count, p.peak_separation, p.rms_spread);
    }
    match series.merge_time {
        Some(t) => println!("first single-peak snapshot at t~ = {t}"),
        None => println!("the lobes had not merged by t~ = {}", lattice.t_final()),
    }
    Ok(())
}
