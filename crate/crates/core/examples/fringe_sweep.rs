//! Fringe width versus 1/m~ with and without self-gravity.
//!
//! Run with `cargo run --release --example fringe_sweep`.

use rayon::prelude::*;
use sn_interference::analysis::{fringe_width_scan, DEFAULT_MIN_PROMINENCE, DEFAULT_T_EVAL};
use sn_interference::lattice::{prepare_double_gaussian, Lattice, SetupParams};
use sn_interference::oracles::{free_fringe_spacing, free_side_peak_offset, FreeGaussianParams};
use sn_interference::propagator::{evolve, RunRecord, StepScheme};

fn main() -> sn_interference::Result<()> {
    let lattice = Lattice::standard();
    let masses = [0.2, 0.3, 0.4, 0.5, 0.6];
    let jobs: Vec<(f64, bool)> = masses.iter().flat_map(|&m| [(m, false), (m, true)]).collect();
    let records = jobs
        .par_iter()
        .map(|&(m, gravity)| {
            let params = SetupParams::with_mass(m, gravity);
            let psi0 = prepare_double_gaussian(&lattice, &params)?;
            evolve(&psi0, &params, &lattice, &StepScheme::frozen(), &[DEFAULT_T_EVAL])
        })
        .collect::<sn_interference::Result<Vec<RunRecord>>>()?;
    let scan = fringe_width_scan(&records, DEFAULT_T_EVAL, DEFAULT_MIN_PROMINENCE)?;

    let show = |w: Option<f64>| w.map(|v| format!("{v:8.3}")).unwrap_or_else(|| "    none".into());
    println!("  m~    1/m~   w_free   w_sn     period   side peak");
    for row in &scan.rows {
        let p = FreeGaussianParams::new(6.0, 2.0, row.m_tilde)?;
        println!(
            "{:5.2} {:6.3} {} {} {:8.3} {}",
            row.m_tilde,
            row.inv_m_tilde,
            show(row.w_free),
            show(row.w_sn),
            free_fringe_spacing(DEFAULT_T_EVAL, &p)?,
            show(free_side_peak_offset(DEFAULT_T_EVAL, &p, lattice.x_max()))
        );
    }
    for (name, fit) in [("through origin", scan.fit_origin), ("affine", scan.fit_affine)] {
        if let Some(f) = fit {
            println!(
                "{name:>15}: w = {:.3}/m~ + {:.3}, relative rms {:.2}%",
                f.slope,
                f.intercept,
                100.0 * f.relative_rms
            );
        }
    }
    Ok(())
}
