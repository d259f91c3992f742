//! Spatial grid, wave state and the two-Gaussian initial condition.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Smallest lattice that still has an interior node.
pub const MIN_POINTS: usize = 3;

/// Uniform 1D grid plus the time-stepping metadata of a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lattice {
    x_min: f64,
    x_max: f64,
    n_points: usize,
    dx: f64,
    t_final: f64,
    n_steps: usize,
    dt: f64,
}

impl Lattice {
    pub fn new(x_min: f64, x_max: f64, n_points: usize, t_final: f64, n_steps: usize) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite()) || x_min >= x_max {
            return Err(Error::invalid(format!(
                "lattice extent must satisfy x_min < x_max, got [{x_min}, {x_max}]"
            )));
        }
        if n_points < MIN_POINTS {
            return Err(Error::invalid(format!(
                "lattice needs at least {MIN_POINTS} nodes, got {n_points}"
            )));
        }
        if !t_final.is_finite() || t_final <= 0.0 {
            return Err(Error::invalid(format!("t_final must be positive, got {t_final}")));
        }
        if n_steps == 0 {
            return Err(Error::invalid("n_steps must be at least 1"));
        }
        Ok(Self {
            x_min,
            x_max,
            n_points,
            dx: (x_max - x_min) / (n_points - 1) as f64,
            t_final,
            n_steps,
            dt: t_final / n_steps as f64,
        })
    }

    /// `[-70, 70]` with 2001 nodes (`dx = 0.07`), `t` in `[0, 10]` over 1000 steps.
    pub fn standard() -> Self {
        Self::new(-70.0, 70.0, 2001, 10.0, 1000).expect("default lattice is valid")
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn t_final(&self) -> f64 {
        self.t_final
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Position of node `i`.
    ///
    /// Measured from the midpoint of the extent so that a lattice symmetric about
    /// the origin has bit-exact mirrored node positions.
    pub fn x(&self, i: usize) -> f64 {
        let center = 0.5 * (self.x_min + self.x_max);
        let offset = i as f64 - 0.5 * (self.n_points - 1) as f64;
        center + offset * self.dx
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n_points).map(|i| self.x(i)).collect()
    }

    /// Same extent and duration with `factor` times finer spacing and time step.
    pub fn refined(&self, factor: usize) -> Result<Self> {
        Self::new(
            self.x_min,
            self.x_max,
            (self.n_points - 1) * factor + 1,
            self.t_final,
            self.n_steps * factor,
        )
    }

    /// Same resolution and duration on an extent grown by `factor` in each direction.
    pub fn widened(&self, factor: usize) -> Result<Self> {
        let center = 0.5 * (self.x_min + self.x_max);
        let half = 0.5 * (self.x_max - self.x_min) * factor as f64;
        Self::new(
            center - half,
            center + half,
            (self.n_points - 1) * factor + 1,
            self.t_final,
            self.n_steps,
        )
    }

    /// Same grid, different run length at the same time step.
    pub fn with_duration(&self, t_final: f64) -> Result<Self> {
        let n_steps = (t_final / self.dt).round() as usize;
        Self::new(self.x_min, self.x_max, self.n_points, n_steps as f64 * self.dt, n_steps)
    }

    pub(crate) fn check_len(&self, len: usize, what: &str) -> Result<()> {
        if len != self.n_points {
            return Err(Error::invalid(format!(
                "{what} has {len} values but the lattice has {} nodes",
                self.n_points
            )));
        }
        Ok(())
    }
}

/// Complex amplitude per lattice node at dimensionless time `t_tilde`.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveState {
    pub amplitudes: Vec<Complex64>,
    pub t_tilde: f64,
}

impl WaveState {
    pub fn new(amplitudes: Vec<Complex64>, t_tilde: f64) -> Self {
        Self { amplitudes, t_tilde }
    }

    pub fn zeros(lattice: &Lattice) -> Self {
        Self::new(vec![Complex64::new(0.0, 0.0); lattice.n_points()], 0.0)
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn density(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Rescales so the discrete norm is one. A zero state is left untouched.
    pub fn normalize(&mut self, lattice: &Lattice) -> Result<()> {
        let norm = discrete_norm(self, lattice)?;
        if norm > 0.0 {
            let s = 1.0 / norm.sqrt();
            self.amplitudes.iter_mut().for_each(|a| *a *= s);
        }
        Ok(())
    }

    /// Largest modulus at the two end nodes.
    pub fn boundary_modulus(&self) -> (usize, f64) {
        let n = self.amplitudes.len();
        let left = self.amplitudes[0].norm();
        let right = self.amplitudes[n - 1].norm();
        if left >= right {
            (0, left)
        } else {
            (n - 1, right)
        }
    }
}

/// Physical setup of the double-slit state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SetupParams {
    /// Half slit separation.
    pub d: f64,
    /// Width of each Gaussian.
    pub sigma: f64,
    pub m_tilde: f64,
    /// Regularization length of the gravitational kernel.
    pub epsilon: f64,
    pub gravity_on: bool,
    /// Multiplies the `m_tilde^2` self-gravity prefactor; `0` switches the coupling off
    /// while keeping the gravity code path.
    pub coupling_scale: f64,
}

impl Default for SetupParams {
    fn default() -> Self {
        Self {
            d: 6.0,
            sigma: 2.0,
            m_tilde: 0.5,
            epsilon: 0.01,
            gravity_on: true,
            coupling_scale: 1.0,
        }
    }
}

impl SetupParams {
    pub fn with_mass(m_tilde: f64, gravity_on: bool) -> Self {
        Self { m_tilde, gravity_on, ..Self::default() }
    }

    /// Prefactor of the self-gravity potential, zero when gravity is off.
    pub fn coupling(&self) -> f64 {
        if self.gravity_on {
            self.coupling_scale * self.m_tilde * self.m_tilde
        } else {
            0.0
        }
    }

    /// All violated preconditions, empty when valid.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (name, v) in [
            ("d", self.d),
            ("sigma", self.sigma),
            ("m_tilde", self.m_tilde),
            ("epsilon", self.epsilon),
        ] {
            if !v.is_finite() || v <= 0.0 {
                out.push(format!("{name} must be positive, got {v}"));
            }
        }
        if !self.coupling_scale.is_finite() || self.coupling_scale < 0.0 {
            out.push(format!("coupling_scale must be non-negative, got {}", self.coupling_scale));
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::invalid(v.join("; ")))
        }
    }
}

pub fn make_lattice(x_min: f64, x_max: f64, n_points: usize, t_final: f64, n_steps: usize) -> Result<Lattice> {
    Lattice::new(x_min, x_max, n_points, t_final, n_steps)
}

/// Rectangle-rule norm `sum |psi_i|^2 dx`.
pub fn discrete_norm(state: &WaveState, lattice: &Lattice) -> Result<f64> {
    lattice.check_len(state.len(), "wave state")?;
    Ok(state.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>() * lattice.dx())
}

/// Samples `exp(-(x-d)^2/2 sigma^2) + exp(-(x+d)^2/2 sigma^2)` and normalizes it on the grid.
pub fn prepare_double_gaussian(lattice: &Lattice, params: &SetupParams) -> Result<WaveState> {
    params.validate()?;
    let reach = params.d + 3.0 * params.sigma;
    if reach >= lattice.x_max() || -reach <= lattice.x_min() {
        return Err(Error::Config(vec![format!(
            "packets at +/-{} with width {} do not fit in [{}, {}]",
            params.d,
            params.sigma,
            lattice.x_min(),
            lattice.x_max()
        )]));
    }
    let two_s2 = 2.0 * params.sigma * params.sigma;
    let amplitudes = (0..lattice.n_points())
        .map(|i| {
            let x = lattice.x(i);
            let a = -(x - params.d) * (x - params.d) / two_s2;
            let b = -(x + params.d) * (x + params.d) / two_s2;
            Complex64::new(a.exp() + b.exp(), 0.0)
        })
        .collect();
    let mut state = WaveState::new(amplitudes, 0.0);
    state.normalize(lattice)?;
    Ok(state)
}
