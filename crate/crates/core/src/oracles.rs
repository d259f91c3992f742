//! Closed-form free evolution of the two-Gaussian state, used as a reference.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lattice::{Lattice, SetupParams, WaveState};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FreeGaussianParams {
    pub d: f64,
    pub sigma: f64,
    pub m_tilde: f64,
}

impl FreeGaussianParams {
    pub fn new(d: f64, sigma: f64, m_tilde: f64) -> Result<Self> {
        for (name, v) in [("d", d), ("sigma", sigma), ("m_tilde", m_tilde)] {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::invalid(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(Self { d, sigma, m_tilde })
    }

    /// Continuum normalization of the `t = 0` superposition, cross term included.
    pub fn amplitude(&self) -> f64 {
        let overlap = (-self.d * self.d / (self.sigma * self.sigma)).exp();
        (2.0 * self.sigma * PI.sqrt() * (1.0 + overlap)).powf(-0.5)
    }

    /// Marginal width of one packet, `sigma sqrt(1 + (t / m sigma^2)^2)`.
    pub fn packet_width(&self, t_tilde: f64) -> f64 {
        let tau = t_tilde / (self.m_tilde * self.sigma * self.sigma);
        self.sigma * (1.0 + tau * tau).sqrt()
    }
}

impl From<&SetupParams> for FreeGaussianParams {
    fn from(p: &SetupParams) -> Self {
        Self { d: p.d, sigma: p.sigma, m_tilde: p.m_tilde }
    }
}

/// Normalized amplitude of the freely evolved superposition at `(x, t_tilde)`.
pub fn free_double_gaussian(x: f64, t_tilde: f64, params: &FreeGaussianParams) -> Complex64 {
    let s2 = params.sigma * params.sigma;
    let spread = Complex64::new(1.0, t_tilde / (params.m_tilde * s2));
    let prefactor = params.amplitude() / spread.sqrt();
    let packet = |c: f64| (-(x - c) * (x - c) / (2.0 * s2 * spread)).exp();
    prefactor * (packet(params.d) + packet(-params.d))
}

/// The free solution sampled on `lattice` at `t_tilde`.
pub fn sample_free_state(lattice: &Lattice, t_tilde: f64, params: &FreeGaussianParams) -> WaveState {
    let amps = (0..lattice.n_points())
        .map(|i| free_double_gaussian(lattice.x(i), t_tilde, params))
        .collect();
    WaveState::new(amps, t_tilde)
}

/// Period of the interference term, `pi (m sigma^4 + t^2 / m) / (d t)`.
///
/// For `t >> m sigma^2` this is `pi t / (m d)`, the classic `h t / (2 m d)`.
/// The Gaussian envelope pulls the actual side maxima inward of this period; see
/// [`free_side_peak_offset`] for their exact location.
pub fn free_fringe_spacing(t_tilde: f64, params: &FreeGaussianParams) -> Result<f64> {
    if !t_tilde.is_finite() || t_tilde <= 0.0 {
        return Err(Error::invalid(format!("t_tilde must be positive, got {t_tilde}")));
    }
    let m = params.m_tilde;
    Ok(PI * (m * params.sigma.powi(4) + t_tilde * t_tilde / m) / (params.d * t_tilde))
}

fn free_density(x: f64, t_tilde: f64, params: &FreeGaussianParams) -> f64 {
    free_double_gaussian(x, t_tilde, params).norm_sqr()
}

/// Position of the first local maximum of the free density on `x > 0`.
///
/// Brute-force scan on a fine grid followed by golden-section refinement; `None`
/// when the density decreases monotonically away from the origin within `x_max`.
pub fn free_side_peak_offset(t_tilde: f64, params: &FreeGaussianParams, x_max: f64) -> Option<f64> {
    const SAMPLES: usize = 200_000;
    let h = x_max / SAMPLES as f64;
    let f = |x: f64| free_density(x, t_tilde, params);
    let mut prev = f(0.0);
    let mut cur = f(h);
    for k in 2..=SAMPLES {
        let next = f(k as f64 * h);
        if cur > prev && cur >= next {
            return Some(golden_max(f, (k - 2) as f64 * h, k as f64 * h));
        }
        prev = cur;
        cur = next;
    }
    None
}

fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    while (b - a).abs() > 1e-12 * (1.0 + a.abs()) {
        if f(c) > f(d) {
            b = d;
        } else {
            a = c;
        }
        c = b - r * (b - a);
        d = a + r * (b - a);
    }
    0.5 * (a + b)
}
