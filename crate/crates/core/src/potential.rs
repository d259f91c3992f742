//! Regularized self-gravity potential
//!
//! ```text
//! V(x_i) = -m_tilde^2 * sum_j |psi_j|^2 dx / sqrt((x_i - x_j)^2 + eps^2)
//! ```
//!
//! evaluated either by direct summation or as a zero-padded FFT convolution.
//! The `j = i` term is included. Both paths are single-threaded, so results are
//! bit-reproducible for a given input.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::lattice::{Lattice, WaveState};

/// Lattices with at least this many nodes use the FFT path by default.
pub const FAST_THRESHOLD: usize = 512;

#[derive(Debug, Clone, PartialEq)]
pub struct PotentialField {
    pub values: Vec<f64>,
    /// Time of the state the potential was built from.
    pub built_from_time: f64,
}

impl PotentialField {
    pub fn zeros(lattice: &Lattice, t_tilde: f64) -> Self {
        Self { values: vec![0.0; lattice.n_points()], built_from_time: t_tilde }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelMethod {
    Auto,
    Direct,
    Fast,
}

impl KernelMethod {
    pub fn resolve(self, n_points: usize) -> KernelMethod {
        match self {
            KernelMethod::Auto if n_points >= FAST_THRESHOLD => KernelMethod::Fast,
            KernelMethod::Auto => KernelMethod::Direct,
            other => other,
        }
    }
}

fn check_inputs(lattice: &Lattice, len: usize, coupling: f64, epsilon: f64) -> Result<()> {
    lattice.check_len(len, "density")?;
    if !epsilon.is_finite() || epsilon <= 0.0 {
        return Err(Error::invalid(format!(
            "epsilon must be positive (the bare kernel is singular), got {epsilon}"
        )));
    }
    if !coupling.is_finite() || coupling < 0.0 {
        return Err(Error::invalid(format!("coupling must be non-negative, got {coupling}")));
    }
    Ok(())
}

/// `1 / sqrt((k dx)^2 + eps^2)` for `k = 0..n`.
fn kernel_table(n: usize, dx: f64, epsilon: f64) -> Vec<f64> {
    (0..n)
        .map(|k| {
            let u = k as f64 * dx;
            1.0 / (u * u + epsilon * epsilon).sqrt()
        })
        .collect()
}

/// Precomputed self-potential evaluator for one lattice and regularization.
pub struct SelfPotential {
    dx: f64,
    n: usize,
    epsilon: f64,
    engine: Engine,
}

enum Engine {
    Direct {
        table: Vec<f64>,
    },
    Fast {
        forward: Arc<dyn Fft<f64>>,
        inverse: Arc<dyn Fft<f64>>,
        kernel_hat: Vec<Complex64>,
        buffer: Vec<Complex64>,
        scratch: Vec<Complex64>,
    },
}

impl SelfPotential {
    pub fn new(lattice: &Lattice, epsilon: f64, method: KernelMethod) -> Result<Self> {
        check_inputs(lattice, lattice.n_points(), 0.0, epsilon)?;
        let n = lattice.n_points();
        let table = kernel_table(n, lattice.dx(), epsilon);
        let engine = match method.resolve(n) {
            KernelMethod::Fast => {
                // circular convolution of length >= 2n - 1 equals the linear one
                let len = (2 * n - 1).next_power_of_two();
                let mut planner = FftPlanner::new();
                let forward = planner.plan_fft_forward(len);
                let inverse = planner.plan_fft_inverse(len);
                let mut kernel_hat = vec![Complex64::new(0.0, 0.0); len];
                kernel_hat[0] = Complex64::new(table[0], 0.0);
                for k in 1..n {
                    kernel_hat[k] = Complex64::new(table[k], 0.0);
                    kernel_hat[len - k] = Complex64::new(table[k], 0.0);
                }
                forward.process(&mut kernel_hat);
                let scratch_len = forward
                    .get_inplace_scratch_len()
                    .max(inverse.get_inplace_scratch_len());
                Engine::Fast {
                    forward,
                    inverse,
                    kernel_hat,
                    buffer: vec![Complex64::new(0.0, 0.0); len],
                    scratch: vec![Complex64::new(0.0, 0.0); scratch_len],
                }
            }
            _ => Engine::Direct { table },
        };
        Ok(Self { dx: lattice.dx(), n, epsilon, engine })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn is_fast(&self) -> bool {
        matches!(self.engine, Engine::Fast { .. })
    }

    /// Potential sourced by `density` (|psi|^2 per node) with prefactor `-coupling`.
    pub fn evaluate_into(&mut self, density: &[f64], coupling: f64, out: &mut [f64]) {
        debug_assert_eq!(density.len(), self.n);
        debug_assert_eq!(out.len(), self.n);
        let n = self.n;
        let dx = self.dx;
        match &mut self.engine {
            Engine::Direct { table } => {
                for (i, v) in out.iter_mut().enumerate() {
                    let mut acc = 0.0;
                    for (j, &rho) in density.iter().enumerate() {
                        acc += table[i.abs_diff(j)] * rho;
                    }
                    *v = -coupling * acc * dx;
                }
            }
            Engine::Fast { forward, inverse, kernel_hat, buffer, scratch } => {
                let len = buffer.len();
                for (b, &rho) in buffer.iter_mut().zip(density) {
                    *b = Complex64::new(rho, 0.0);
                }
                buffer[n..].iter_mut().for_each(|b| *b = Complex64::new(0.0, 0.0));
                forward.process_with_scratch(buffer, scratch);
                buffer.iter_mut().zip(kernel_hat.iter()).for_each(|(b, k)| *b *= k);
                inverse.process_with_scratch(buffer, scratch);
                let scale = -coupling * dx / len as f64;
                for (v, b) in out.iter_mut().zip(buffer.iter()) {
                    *v = scale * b.re;
                }
            }
        }
    }

    pub fn evaluate(&mut self, state: &WaveState, coupling: f64) -> Result<PotentialField> {
        if state.len() != self.n {
            return Err(Error::invalid(format!(
                "state has {} values, potential built for {}",
                state.len(),
                self.n
            )));
        }
        if !coupling.is_finite() || coupling < 0.0 {
            return Err(Error::invalid(format!("coupling must be non-negative, got {coupling}")));
        }
        let density = state.density();
        let mut values = vec![0.0; self.n];
        self.evaluate_into(&density, coupling, &mut values);
        Ok(PotentialField { values, built_from_time: state.t_tilde })
    }
}

fn potential_with(
    state: &WaveState,
    lattice: &Lattice,
    m_tilde: f64,
    epsilon: f64,
    method: KernelMethod,
) -> Result<PotentialField> {
    if !m_tilde.is_finite() || m_tilde < 0.0 {
        return Err(Error::invalid(format!("m_tilde must be non-negative, got {m_tilde}")));
    }
    check_inputs(lattice, state.len(), m_tilde * m_tilde, epsilon)?;
    SelfPotential::new(lattice, epsilon, method)?.evaluate(state, m_tilde * m_tilde)
}

/// O(N^2) summation.
pub fn self_potential_direct(state: &WaveState, lattice: &Lattice, m_tilde: f64, epsilon: f64) -> Result<PotentialField> {
    potential_with(state, lattice, m_tilde, epsilon, KernelMethod::Direct)
}

/// FFT convolution, same contract as [`self_potential_direct`].
pub fn self_potential_fast(state: &WaveState, lattice: &Lattice, m_tilde: f64, epsilon: f64) -> Result<PotentialField> {
    potential_with(state, lattice, m_tilde, epsilon, KernelMethod::Fast)
}

/// Picks the direct sum below [`FAST_THRESHOLD`] nodes and the FFT path above.
pub fn self_potential(state: &WaveState, lattice: &Lattice, m_tilde: f64, epsilon: f64) -> Result<PotentialField> {
    potential_with(state, lattice, m_tilde, epsilon, KernelMethod::Auto)
}

/// Self-interaction energy `(1/2) sum V_i |psi_i|^2 dx`; the half avoids counting each pair twice.
pub fn potential_energy(state: &WaveState, potential: &PotentialField, lattice: &Lattice) -> Result<f64> {
    lattice.check_len(state.len(), "wave state")?;
    lattice.check_len(potential.values.len(), "potential")?;
    Ok(interaction_energy(&state.density(), &potential.values, lattice.dx()))
}

pub(crate) fn interaction_energy(density: &[f64], potential: &[f64], dx: f64) -> f64 {
    0.5 * density.iter().zip(potential).map(|(r, v)| r * v).sum::<f64>() * dx
}
