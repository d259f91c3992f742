//! Second-order convergence of the free evolution towards the closed-form solution.
//!
//! Run with `cargo run --release --example convergence`.

use sn_interference::lattice::{prepare_double_gaussian, Lattice, SetupParams};
use sn_interference::oracles::{sample_free_state, FreeGaussianParams};
use sn_interference::propagator::{evolve, StepScheme};

fn l2_error(lattice: &Lattice, m: f64, t: f64) -> sn_interference::Result<f64> {
    let params = SetupParams::with_mass(m, false);
    let psi0 = prepare_double_gaussian(lattice, &params)?;
    let record = evolve(&psi0, &params, lattice, &StepScheme::frozen(), &[t])?;
    let exact = sample_free_state(lattice, t, &FreeGaussianParams::from(&params));
    let numeric = &record.snapshot_at(t).expect("requested snapshot").state;
    let sum: f64 = numeric.amplitudes.iter().zip(&exact.amplitudes).map(|(a, b)| (a - b).norm_sqr()).sum();
    Ok((sum * lattice.dx()).sqrt())
}

fn main() -> sn_interference::Result<()> {
    let (m, t) = (0.2, 8.9);
    for (label, base) in [("standard box", Lattice::standard()), ("doubled box", Lattice::standard().widened(2)?)] {
        println!("{label}:");
        let mut previous = None;
        for factor in [1usize, 2, 4] {
            let lattice = base.refined(factor)?;
            let err = l2_error(&lattice, m, t)?;
            let ratio = previous.map(|p: f64| format!("{:.2}", p / err)).unwrap_or_default();
            println!("  dx = {:.4}  dt = {:.5}  L2 error = {err:.3e}  {ratio}", lattice.dx(), lattice.dt());
            previous = Some(err);
        }
    }
    Ok(())
}
