//! Physical units for the dimensionless KGW system.
//!
//! `μ = (1/N)(m_P/m)²`, `ε = 1/μ²`, length scale `λ = ħ²/(G N m³)`, with
//! `N = M/m` the number of particles of mass `m` making up total mass `M`.
//! All quantities in cgs.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Constants used by [`convert_units`]. Defaults are CODATA 2018 and the
/// IAU nominal solar mass.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct Constants {
    /// erg·s
    pub hbar: f64,
    /// cm/s
    pub c: f64,
    /// cm³ g⁻¹ s⁻²
    pub g: f64,
    /// g
    pub solar_mass: f64,
}

impl Default for Constants {
    fn default() -> Self {
        Self {
            hbar: 1.054571817e-27,
            c: 2.99792458e10,
            g: 6.67430e-8,
            solar_mass: 1.98847e33,
        }
    }
}

impl Constants {
    /// Reads the `[constants]` table of a TOML document; absent keys keep
    /// their defaults.
    pub fn from_toml(text: &str) -> Result<Self> {
        let mut doc: toml::Table = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        match doc.remove("constants") {
            Some(v) => v.try_into().map_err(|e: toml::de::Error| Error::Config(e.to_string())),
            None => Ok(Self::default()),
        }
    }

    pub fn planck_mass(&self) -> f64 {
        (self.hbar * self.c / self.g).sqrt()
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct PhysicalParams {
    /// g
    pub particle_mass: f64,
    /// g
    pub total_mass: f64,
    pub total_mass_solar: f64,
    pub n: f64,
    pub mu: f64,
    pub mu2: f64,
    pub epsilon: f64,
    /// cm
    pub length_scale: f64,
}

pub fn convert_units(m: f64, total_mass: f64, k: &Constants) -> Result<PhysicalParams> {
    if !(m > 0.0 && total_mass > 0.0 && m.is_finite() && total_mass.is_finite()) {
        return Err(Error::Domain(format!(
            "particle and total mass must be positive, got {m} and {total_mass}"
        )));
    }
    let n = total_mass / m;
    let ratio = k.planck_mass() / m;
    let mu = ratio * ratio / n;
    Ok(PhysicalParams {
        particle_mass: m,
        total_mass,
        total_mass_solar: total_mass / k.solar_mass,
        n,
        mu,
        mu2: mu * mu,
        epsilon: 1.0 / (mu * mu),
        length_scale: k.hbar * k.hbar / (k.g * n * m.powi(3)),
    })
}

/// Particle mass recovered from `μ` and `N`: `m = m_P/√(μN)`.
pub fn particle_mass_from(mu: f64, n: f64, k: &Constants) -> Result<f64> {
    if !(mu > 0.0 && n > 0.0) {
        return Err(Error::Domain(format!("mu and N must be positive, got {mu} and {n}")));
    }
    Ok(k.planck_mass() / (mu * n).sqrt())
}
