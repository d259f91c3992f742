//! Numerical integration of the one-dimensional Schrödinger–Newton equation for a
//! double-slit (two-Gaussian) initial state.
//!
//! The dimensionless equation solved is
//!
//! ```text
//! i dpsi/dt = -(1/2m) d2psi/dx2 - m^2 [ integral |psi(x')|^2 / sqrt((x-x')^2 + eps^2) dx' ] psi
//! ```
//!
//! on a uniform grid with Crank–Nicolson time stepping. The crate also extracts the
//! observables used to compare self-gravitating and free evolution: fringe width,
//! visibility, spread and the separation of the two lobes.
//!
//! ```no_run
//! use sn_interference::prelude::*;
//!
//! let lattice = Lattice::standard();
//! let params = SetupParams::with_mass(0.5, true);
//! let psi0 = prepare_double_gaussian(&lattice, &params)?;
//! let record = evolve(&psi0, &params, &lattice, &StepScheme::frozen(), &[8.9])?;
//! let rho = record.snapshot_at(8.9).unwrap().density();
//! println!("{:?}", fringe_width(&rho, &lattice, DEFAULT_MIN_PROMINENCE)?);
//! # Ok::<(), sn_interference::Error>(())
//! ```

pub mod analysis;
pub mod campaign;
pub mod config;
pub mod error;
pub mod lattice;
pub mod oracles;
pub mod output;
pub mod potential;
pub mod propagator;
pub mod units;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::analysis::{
        attraction_series, find_peaks, fringe_metrics, fringe_width, fringe_width_scan, FringeMetrics,
        FringeScan, PeakSet, DEFAULT_MIN_PROMINENCE, DEFAULT_T_EVAL,
    };
    pub use crate::error::{Error, Result};
    pub use crate::lattice::{discrete_norm, make_lattice, prepare_double_gaussian, Lattice, SetupParams, WaveState};
    pub use crate::oracles::{free_double_gaussian, free_fringe_spacing, FreeGaussianParams};
    pub use crate::potential::{
        potential_energy, self_potential, self_potential_direct, self_potential_fast, KernelMethod, PotentialField,
    };
    pub use crate::propagator::{cn_step, evolve, kinetic_energy, Evolution, RunRecord, StepScheme};
    pub use crate::units::{feasibility_report, Quantity, ScaleSystem};
}
