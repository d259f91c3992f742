//! Direct O(N^2) summation against the zero-padded FFT convolution.
//!
//! Run with `cargo run --release --example kernel_benchmark`.

use std::time::Instant;

use sn_interference::lattice::{prepare_double_gaussian, Lattice, SetupParams};
use sn_interference::potential::{KernelMethod, SelfPotential};

fn main() -> sn_interference::Result<()> {
    println!("    N   direct (us)   fft (us)   speedup   max rel diff");
    for n in [129usize, 257, 513, 1001, 2001, 4001] {
        let lattice = Lattice::new(-70.0, 70.0, n, 10.0, 1000)?;
        let params = SetupParams::default();
        let rho = prepare_double_gaussian(&lattice, &params)?.density();
        let coupling = params.coupling();
        let reps = (2_000_000 / (n * n)).max(3);
        let time = |method| -> sn_interference::Result<(f64, Vec<f64>)> {
            let mut engine = SelfPotential::new(&lattice, params.epsilon, method)?;
            let mut out = vec![0.0; n];
            let start = Instant::now();
            for _ in 0..reps {
                engine.evaluate_into(&rho, coupling, &mut out);
            }
            Ok((start.elapsed().as_secs_f64() * 1e6 / reps as f64, out))
        };
        let (td, vd) = time(KernelMethod::Direct)?;
        let (tf, vf) = time(KernelMethod::Fast)?;
        let scale = vd.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let diff = vd.iter().zip(&vf).fold(0.0f64, |m, (a, b)| m.max((a - b).abs())) / scale;
        println!("{n:5} {td:12.1} {tf:10.1} {:9.1} {diff:14.2e}", td / tf);
    }
    Ok(())
}
