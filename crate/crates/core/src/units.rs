//! Reference scales for the dimensionless Schrödinger–Newton equation.
//!
//! Fixing a length scale `sigma_r` determines the time and mass scales
//!
//! ```text
//! t_r = (sigma_r^5 / (G hbar))^(1/3)
//! m_r = (hbar^2 / (G sigma_r))^(1/3)
//! ```
//!
//! after which the equation depends on the single parameter `m / m_r`.

use std::fmt;

use crate::error::{Error, Result};

/// CODATA 2018 values, SI units.
pub mod codata {
    /// Newtonian constant of gravitation, m^3 kg^-1 s^-2.
    pub const G: f64 = 6.674_30e-11;
    /// Reduced Planck constant, J s.
    pub const HBAR: f64 = 1.054_571_817e-34;
    /// Unified atomic mass unit, kg.
    pub const ATOMIC_MASS_UNIT: f64 = 1.660_539_066_60e-27;
}

/// Half slit separation in units of `sigma_r` for the double-slit setup.
pub const HALF_SLIT_SEPARATION: f64 = 6.0;

pub fn kg_to_u(kg: f64) -> f64 {
    kg / codata::ATOMIC_MASS_UNIT
}

pub fn u_to_kg(u: f64) -> f64 {
    u * codata::ATOMIC_MASS_UNIT
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dimension {
    Length,
    Time,
    Mass,
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Dimension::Length => "length",
            Dimension::Time => "time",
            Dimension::Mass => "mass",
        })
    }
}

/// An SI value tagged with its dimension (meters, seconds or kilograms).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quantity {
    pub value: f64,
    pub dimension: Dimension,
}

impl Quantity {
    pub fn meters(value: f64) -> Self {
        Self { value, dimension: Dimension::Length }
    }

    pub fn seconds(value: f64) -> Self {
        Self { value, dimension: Dimension::Time }
    }

    pub fn kilograms(value: f64) -> Self {
        Self { value, dimension: Dimension::Mass }
    }

    pub fn atomic_mass_units(value: f64) -> Self {
        Self::kilograms(u_to_kg(value))
    }
}

/// A dimensionless value that remembers which physical dimension it was scaled from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scaled {
    pub value: f64,
    pub dimension: Dimension,
}

impl Scaled {
    pub fn new(value: f64, dimension: Dimension) -> Self {
        Self { value, dimension }
    }

    /// Unwraps the number, failing if it carries a different dimension.
    pub fn expect(self, dimension: Dimension) -> Result<f64> {
        if self.dimension != dimension {
            return Err(Error::invalid(format!(
                "dimension mismatch: expected {dimension}, got {}",
                self.dimension
            )));
        }
        Ok(self.value)
    }
}

/// The `(sigma_r, t_r, m_r)` nondimensionalization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaleSystem {
    sigma_r: f64,
    t_r: f64,
    m_r: f64,
}

impl ScaleSystem {
    pub fn new(sigma_r: f64) -> Result<Self> {
        if !sigma_r.is_finite() || sigma_r <= 0.0 {
            return Err(Error::invalid(format!(
                "sigma_r must be positive and finite, got {sigma_r}"
            )));
        }
        let t_r = (sigma_r.powi(5) / (codata::G * codata::HBAR)).cbrt();
        let m_r = (codata::HBAR * codata::HBAR / (codata::G * sigma_r)).cbrt();
        Ok(Self { sigma_r, t_r, m_r })
    }

    /// Length scale in meters.
    pub fn sigma_r(&self) -> f64 {
        self.sigma_r
    }

    /// Time scale in seconds.
    pub fn t_r(&self) -> f64 {
        self.t_r
    }

    /// Mass scale in kilograms.
    pub fn m_r(&self) -> f64 {
        self.m_r
    }

    pub fn m_r_in_u(&self) -> f64 {
        kg_to_u(self.m_r)
    }

    fn unit(&self, dimension: Dimension) -> f64 {
        match dimension {
            Dimension::Length => self.sigma_r,
            Dimension::Time => self.t_r,
            Dimension::Mass => self.m_r,
        }
    }

    pub fn to_dimensionless(&self, q: Quantity) -> Result<Scaled> {
        if !q.value.is_finite() {
            return Err(Error::invalid(format!("non-finite {} {}", q.dimension, q.value)));
        }
        Ok(Scaled::new(q.value / self.unit(q.dimension), q.dimension))
    }

    pub fn to_si(&self, s: Scaled) -> Result<Quantity> {
        if !s.value.is_finite() {
            return Err(Error::invalid(format!("non-finite scaled {} {}", s.dimension, s.value)));
        }
        Ok(Quantity { value: s.value * self.unit(s.dimension), dimension: s.dimension })
    }
}

/// Experimental parameters needed to reach a target `(m_tilde, t_tilde)` with a given particle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeasibilityReport {
    pub mass_kg: f64,
    pub target_m_tilde: f64,
    pub target_t_tilde: f64,
    pub scale: ScaleSystem,
    /// Full slit separation `2d` in meters.
    pub slit_separation: f64,
    /// Physical evolution time in seconds.
    pub evolution_time: f64,
}

impl FeasibilityReport {
    pub fn sigma_r(&self) -> f64 {
        self.scale.sigma_r()
    }

    pub fn mass_u(&self) -> f64 {
        kg_to_u(self.mass_kg)
    }
}

/// Inverts the mass scale relation for the particle mass `mass`.
pub fn feasibility_report(
    mass: Quantity,
    target_m_tilde: f64,
    target_t_tilde: f64,
) -> Result<FeasibilityReport> {
    let mass_kg = match mass.dimension {
        Dimension::Mass => mass.value,
        other => {
            return Err(Error::invalid(format!("feasibility needs a mass, got a {other}")));
        }
    };
    for (name, v) in [
        ("mass", mass_kg),
        ("target m_tilde", target_m_tilde),
        ("target t_tilde", target_t_tilde),
    ] {
        if !v.is_finite() || v <= 0.0 {
            return Err(Error::invalid(format!("{name} must be positive and finite, got {v}")));
        }
    }
    let m_r = mass_kg / target_m_tilde;
    let sigma_r = codata::HBAR * codata::HBAR / (codata::G * m_r.powi(3));
    let scale = ScaleSystem::new(sigma_r)?;
    Ok(FeasibilityReport {
        mass_kg,
        target_m_tilde,
        target_t_tilde,
        scale,
        slit_separation: 2.0 * HALF_SLIT_SEPARATION * sigma_r,
        evolution_time: target_t_tilde * scale.t_r(),
    })
}
