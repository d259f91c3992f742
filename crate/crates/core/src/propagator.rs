//! Crank–Nicolson time stepping of the self-gravitating Schrödinger equation.
//!
//! Each step solves `(1 + i dt/2 H) psi' = (1 - i dt/2 H) psi` with
//! `H = -(1/2m) D2 + diag(V)`, `D2` the three-point Laplacian with `psi = 0` on
//! ghost nodes just outside the grid. For a fixed `V` this is a Cayley transform of a
//! Hermitian matrix, so the norm is preserved up to round-off.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lattice::{discrete_norm, Lattice, SetupParams, WaveState};
use crate::potential::{interaction_energy, KernelMethod, PotentialField, SelfPotential};

/// Default abort threshold on the modulus of either end node.
pub const DEFAULT_BOUNDARY_TOLERANCE: f64 = 5e-3;

pub const MAX_PICARD_ITERATIONS: usize = 8;

/// How the potential is coupled to the state within one step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CouplingMode {
    /// `V` built from the state at the start of the step.
    FrozenPotential,
    /// `V` of the averaged density `(rho^n + rho^{n+1}) / 2`, refined by Picard iteration.
    PredictorCorrector,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StepScheme {
    pub mode: CouplingMode,
    /// Corrector passes in predictor-corrector mode.
    pub picard_iterations: usize,
}

impl Default for StepScheme {
    fn default() -> Self {
        Self::frozen()
    }
}

impl StepScheme {
    pub fn frozen() -> Self {
        Self { mode: CouplingMode::FrozenPotential, picard_iterations: 1 }
    }

    pub fn predictor_corrector(picard_iterations: usize) -> Self {
        Self { mode: CouplingMode::PredictorCorrector, picard_iterations }
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=MAX_PICARD_ITERATIONS).contains(&self.picard_iterations) {
            return Err(Error::invalid(format!(
                "picard_iterations must be in [1, {MAX_PICARD_ITERATIONS}], got {}",
                self.picard_iterations
            )));
        }
        Ok(())
    }
}

/// Reusable tridiagonal Crank–Nicolson stepper for one lattice and mass.
pub struct CrankNicolson {
    half_dt: f64,
    kinetic_diag: f64,
    /// Off-diagonal of `1 + i dt/2 H`; the right-hand side uses its negative.
    lhs_off: Complex64,
    c_prime: Vec<Complex64>,
    d_prime: Vec<Complex64>,
}

impl CrankNicolson {
    pub fn new(lattice: &Lattice, m_tilde: f64) -> Result<Self> {
        if !m_tilde.is_finite() || m_tilde <= 0.0 {
            return Err(Error::invalid(format!("m_tilde must be positive, got {m_tilde}")));
        }
        let dx2 = lattice.dx() * lattice.dx();
        let half_dt = 0.5 * lattice.dt();
        let n = lattice.n_points();
        Ok(Self {
            half_dt,
            kinetic_diag: 1.0 / (m_tilde * dx2),
            lhs_off: Complex64::new(0.0, half_dt * (-0.5 / (m_tilde * dx2))),
            c_prime: vec![Complex64::new(0.0, 0.0); n],
            d_prime: vec![Complex64::new(0.0, 0.0); n],
        })
    }

    /// Advances `psi` by one step under `potential`, writing into `out`.
    pub fn step(&mut self, psi: &[Complex64], potential: &[f64], out: &mut [Complex64]) -> std::result::Result<(), String> {
        let n = psi.len();
        let off = self.lhs_off;
        let zero = Complex64::new(0.0, 0.0);

        let diag = |i: usize| Complex64::new(1.0, self.half_dt * (self.kinetic_diag + potential[i]));

        // forward sweep; the right-hand side is formed on the fly
        let mut prev_c = zero;
        let mut prev_d = zero;
        for i in 0..n {
            let a = diag(i);
            let left = if i > 0 { psi[i - 1] } else { zero };
            let right = if i + 1 < n { psi[i + 1] } else { zero };
            let rhs = a.conj() * psi[i] - off * (left + right);
            let denom = a - off * prev_c;
            if denom.norm_sqr() == 0.0 || !denom.is_finite() {
                return Err(format!("zero pivot in tridiagonal solve at row {i}"));
            }
            let inv = denom.inv();
            prev_c = off * inv;
            prev_d = (rhs - off * prev_d) * inv;
            self.c_prime[i] = prev_c;
            self.d_prime[i] = prev_d;
        }
        out[n - 1] = self.d_prime[n - 1];
        for i in (0..n - 1).rev() {
            out[i] = self.d_prime[i] - self.c_prime[i] * out[i + 1];
        }
        Ok(())
    }
}

/// One Crank–Nicolson step under a fixed potential.
pub fn cn_step(state: &WaveState, potential: &PotentialField, lattice: &Lattice, m_tilde: f64) -> Result<WaveState> {
    lattice.check_len(state.len(), "wave state")?;
    lattice.check_len(potential.values.len(), "potential")?;
    let mut cn = CrankNicolson::new(lattice, m_tilde)?;
    let mut out = vec![Complex64::new(0.0, 0.0); state.len()];
    let t_next = state.t_tilde + lattice.dt();
    cn.step(&state.amplitudes, &potential.values, &mut out)
        .map_err(|reason| Error::NumericalFailure { t_tilde: t_next, reason })?;
    Ok(WaveState::new(out, t_next))
}

/// `(1/2m) sum |psi_{i+1} - psi_i|^2 / dx`, with zero ghost nodes at both ends.
pub fn kinetic_energy(state: &WaveState, lattice: &Lattice, m_tilde: f64) -> Result<f64> {
    lattice.check_len(state.len(), "wave state")?;
    Ok(kinetic(&state.amplitudes, lattice.dx(), m_tilde))
}

fn kinetic(psi: &[Complex64], dx: f64, m_tilde: f64) -> f64 {
    let n = psi.len();
    let interior: f64 = psi.windows(2).map(|w| (w[1] - w[0]).norm_sqr()).sum();
    let ghosts = psi[0].norm_sqr() + psi[n - 1].norm_sqr();
    (interior + ghosts) / (2.0 * m_tilde * dx)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepDiagnostics {
    pub t_tilde: f64,
    pub norm: f64,
    pub kinetic: f64,
    pub potential: f64,
}

impl StepDiagnostics {
    pub fn energy(&self) -> f64 {
        self.kinetic + self.potential
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub state: WaveState,
    /// Present when gravity is on.
    pub potential: Option<PotentialField>,
}

impl Snapshot {
    pub fn t_tilde(&self) -> f64 {
        self.state.t_tilde
    }

    pub fn density(&self) -> Vec<f64> {
        self.state.density()
    }
}

/// Snapshots and per-step diagnostics of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub params: SetupParams,
    pub lattice: Lattice,
    pub scheme: StepScheme,
    pub snapshots: Vec<Snapshot>,
    /// One entry per step, starting at `t = 0`.
    pub diagnostics: Vec<StepDiagnostics>,
    pub final_state: WaveState,
}

impl RunRecord {
    pub fn snapshot_times(&self) -> Vec<f64> {
        self.snapshots.iter().map(Snapshot::t_tilde).collect()
    }

    /// Snapshot within half a time step of `t_tilde`.
    pub fn snapshot_at(&self, t_tilde: f64) -> Option<&Snapshot> {
        let tol = 0.5 * self.lattice.dt();
        self.snapshots.iter().find(|s| (s.t_tilde() - t_tilde).abs() <= tol)
    }

    pub fn norm_series(&self) -> Vec<(f64, f64)> {
        self.diagnostics.iter().map(|d| (d.t_tilde, d.norm)).collect()
    }

    pub fn energy_series(&self) -> Vec<(f64, f64)> {
        self.diagnostics.iter().map(|d| (d.t_tilde, d.energy())).collect()
    }

    pub fn max_norm_error(&self) -> f64 {
        self.diagnostics.iter().fold(0.0, |m, d| m.max((d.norm - 1.0).abs()))
    }

    /// Largest `|E(t) - E(0)| / |E(0)|` over the run.
    pub fn max_relative_energy_drift(&self) -> f64 {
        let e0 = self.diagnostics[0].energy();
        self.diagnostics
            .iter()
            .fold(0.0, |m, d| m.max(((d.energy() - e0) / e0).abs()))
    }
}

/// Maps requested snapshot times onto step indices.
pub fn snapshot_steps(times: &[f64], lattice: &Lattice) -> Result<Vec<usize>> {
    let dt = lattice.dt();
    let mut steps = Vec::with_capacity(times.len());
    for &t in times {
        if !t.is_finite() || t < -0.5 * dt || t > lattice.t_final() + 0.5 * dt {
            return Err(Error::invalid(format!(
                "snapshot time {t} outside [0, {}]",
                lattice.t_final()
            )));
        }
        let k = (t / dt).round() as usize;
        if let Some(&last) = steps.last() {
            if k <= last {
                return Err(Error::invalid(format!(
                    "snapshot times must be strictly increasing after snapping to dt = {dt}: {t}"
                )));
            }
        }
        steps.push(k);
    }
    Ok(steps)
}

/// Configured time evolution. [`evolve`] runs it with default options.
#[derive(Debug, Clone, Copy)]
pub struct Evolution {
    pub params: SetupParams,
    pub lattice: Lattice,
    pub scheme: StepScheme,
    pub boundary_tolerance: f64,
    pub kernel: KernelMethod,
}

impl Evolution {
    pub fn new(params: SetupParams, lattice: Lattice, scheme: StepScheme) -> Self {
        Self {
            params,
            lattice,
            scheme,
            boundary_tolerance: DEFAULT_BOUNDARY_TOLERANCE,
            kernel: KernelMethod::Auto,
        }
    }

    pub fn boundary_tolerance(mut self, tolerance: f64) -> Self {
        self.boundary_tolerance = tolerance;
        self
    }

    pub fn kernel(mut self, kernel: KernelMethod) -> Self {
        self.kernel = kernel;
        self
    }

    pub fn run(&self, initial: &WaveState, snapshot_times: &[f64]) -> Result<RunRecord> {
        let lattice = &self.lattice;
        let params = &self.params;
        params.validate()?;
        self.scheme.validate()?;
        lattice.check_len(initial.len(), "initial state")?;
        if !(self.boundary_tolerance > 0.0) {
            return Err(Error::invalid(format!(
                "boundary tolerance must be positive, got {}",
                self.boundary_tolerance
            )));
        }
        let snap_steps = snapshot_steps(snapshot_times, lattice)?;

        let n = lattice.n_points();
        let dx = lattice.dx();
        let dt = lattice.dt();
        let m = params.m_tilde;
        let coupling = params.coupling();
        let mut cn = CrankNicolson::new(lattice, m)?;
        let mut gravity = if params.gravity_on {
            Some(SelfPotential::new(lattice, params.epsilon, self.kernel)?)
        } else {
            None
        };

        let mut psi = initial.amplitudes.clone();
        let mut next = vec![Complex64::new(0.0, 0.0); n];
        let mut rho: Vec<f64> = psi.iter().map(|a| a.norm_sqr()).collect();
        let mut mixed = vec![0.0; n];
        let mut v = vec![0.0; n];
        let mut v_mid = vec![0.0; n];
        if let Some(g) = gravity.as_mut() {
            g.evaluate_into(&rho, coupling, &mut v);
        }

        let t0 = initial.t_tilde;
        let diag_at = |t: f64, psi: &[Complex64], rho: &[f64], v: &[f64]| StepDiagnostics {
            t_tilde: t,
            norm: rho.iter().sum::<f64>() * dx,
            kinetic: kinetic(psi, dx, m),
            potential: interaction_energy(rho, v, dx),
        };
        let snapshot = |t: f64, psi: &[Complex64], v: &[f64], gravity_on: bool| Snapshot {
            state: WaveState::new(psi.to_vec(), t),
            potential: gravity_on.then(|| PotentialField { values: v.to_vec(), built_from_time: t }),
        };

        let mut diagnostics = Vec::with_capacity(lattice.n_steps() + 1);
        diagnostics.push(diag_at(t0, &psi, &rho, &v));
        let mut snapshots = Vec::with_capacity(snap_steps.len());
        let mut pending = snap_steps.iter().peekable();
        if pending.peek() == Some(&&0) {
            snapshots.push(snapshot(t0, &psi, &v, gravity.is_some()));
            pending.next();
        }

        for step in 1..=lattice.n_steps() {
            let t = t0 + step as f64 * dt;
            let fail = |reason: String| Error::NumericalFailure { t_tilde: t, reason };
            cn.step(&psi, &v, &mut next).map_err(fail)?;
            if let (CouplingMode::PredictorCorrector, Some(g)) = (self.scheme.mode, gravity.as_mut()) {
                for _ in 0..self.scheme.picard_iterations {
                    for ((mx, r), a) in mixed.iter_mut().zip(&rho).zip(&next) {
                        *mx = 0.5 * (r + a.norm_sqr());
                    }
                    g.evaluate_into(&mixed, coupling, &mut v_mid);
                    cn.step(&psi, &v_mid, &mut next).map_err(fail)?;
                }
            }
            std::mem::swap(&mut psi, &mut next);

            for (r, a) in rho.iter_mut().zip(&psi) {
                *r = a.norm_sqr();
            }
            let norm = rho.iter().sum::<f64>();
            if !norm.is_finite() {
                return Err(fail("non-finite amplitude".into()));
            }
            for node in [0, n - 1] {
                let modulus = psi[node].norm();
                if modulus > self.boundary_tolerance {
                    return Err(Error::BoundaryGuard {
                        t_tilde: t,
                        node,
                        modulus,
                        tolerance: self.boundary_tolerance,
                    });
                }
            }
            if let Some(g) = gravity.as_mut() {
                g.evaluate_into(&rho, coupling, &mut v);
            }
            diagnostics.push(diag_at(t, &psi, &rho, &v));
            if pending.peek() == Some(&&step) {
                snapshots.push(snapshot(t, &psi, &v, gravity.is_some()));
                pending.next();
            }
        }

        let t_end = t0 + lattice.n_steps() as f64 * dt;
        Ok(RunRecord {
            params: *params,
            lattice: *lattice,
            scheme: self.scheme,
            snapshots,
            diagnostics,
            final_state: WaveState::new(psi, t_end),
        })
    }
}

/// Runs the full lattice duration from `initial`, recording the requested snapshots.
pub fn evolve(
    initial: &WaveState,
    params: &SetupParams,
    lattice: &Lattice,
    scheme: &StepScheme,
    snapshot_times: &[f64],
) -> Result<RunRecord> {
    Evolution::new(*params, *lattice, *scheme).run(initial, snapshot_times)
}

/// Norm check helper used by tests and the CLI.
pub fn norm_error(state: &WaveState, lattice: &Lattice) -> Result<f64> {
    Ok((discrete_norm(state, lattice)? - 1.0).abs())
}
