//! Experiment configuration (TOML, schema version 1, unknown keys rejected).

use crate::error::{Error, Result};
use crate::spectral::{Grid, Norm, Scheme, System};
use crate::units::Constants;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub name: String,
    pub grid: GridConfig,
    pub initial: InitialCondition,
    pub run: RunConfig,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub constants: Constants,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub dim: usize,
    pub points_per_dim: usize,
    pub box_length: f64,
}

impl GridConfig {
    pub fn build(&self) -> Result<Grid> {
        if !self.points_per_dim.is_power_of_two() {
            return Err(Error::Config(format!(
                "points_per_dim must be a power of two, got {}",
                self.points_per_dim
            )));
        }
        Grid::new(self.dim, self.points_per_dim, self.box_length)
    }
}

#[derive(Copy, Clone, Debug, Serialize, Deserialize, PartialEq, Eq, Default)]
#[serde(rename_all = "snake_case")]
pub enum PhiInit {
    Zero,
    #[default]
    Poisson,
}

/// Initial data. `boost` multiplies `Ψ` by `e^{ik₀x₁}` with `k₀` rounded to
/// the nearest grid wavenumber.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialCondition {
    /// `u` Gaussian with `‖u‖² = norm`, `p_u = 0`, so `Ψ = u/√2`.
    Gaussian {
        sigma: f64,
        norm: f64,
        #[serde(default)]
        center: f64,
        #[serde(default)]
        boost: f64,
        #[serde(default)]
        phi: PhiInit,
    },
    /// Periodic SP ground state of mass `mass`, optionally resampled as
    /// `s^{d/2} Ψ(s x)`.
    GroundState {
        mass: f64,
        #[serde(default = "one")]
        squeeze: f64,
        #[serde(default)]
        boost: f64,
        #[serde(default = "ground_tol")]
        tol: f64,
    },
    Snapshot { path: PathBuf },
}

fn one() -> f64 {
    1.0
}

fn ground_tol() -> f64 {
    1e-12
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub systems: Vec<System>,
    /// Errors of the other systems are measured against this one.
    #[serde(default)]
    pub reference: Option<System>,
    pub epsilons: Vec<f64>,
    /// Step in `T`; defaults to `min(1e−3, 0.1 √ε dx)`.
    #[serde(default)]
    pub dt: Option<f64>,
    #[serde(default = "one")]
    pub t_end: f64,
    #[serde(default = "rk4")]
    pub kgw_scheme: Scheme,
    #[serde(default)]
    pub diagnostics_every: usize,
    #[serde(default = "yes")]
    pub dealias: bool,
    /// Start the second-order system from `Φ_{G₁}^{−ε}` of the data and map
    /// its samples back with `Φ_{G₁}^{+ε}`.
    #[serde(default = "yes")]
    pub nf2_transform: bool,
    #[serde(default = "l2")]
    pub norm: Norm,
}

fn rk4() -> Scheme {
    Scheme::Rk4
}

fn yes() -> bool {
    true
}

fn l2() -> Norm {
    Norm::L2
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub snapshots: bool,
    pub plots: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { snapshots: true, plots: true }
    }
}

impl RunConfig {
    pub fn dt_for(&self, epsilon: f64, grid: &Grid) -> f64 {
        self.dt.unwrap_or_else(|| (0.1 * epsilon.sqrt() * grid.dx()).min(1e-3))
    }
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Format(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.schema_version != SCHEMA_VERSION {
            return bad(format!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                self.schema_version
            ));
        }
        self.grid.build()?;
        let r = &self.run;
        if r.systems.is_empty() {
            return bad("run.systems is empty".into());
        }
        if r.epsilons.is_empty() {
            return bad("run.epsilons is empty".into());
        }
        if let Some(e) = r.epsilons.iter().find(|e| !(**e > 0.0 && e.is_finite())) {
            return bad(format!("epsilon {e} is not positive"));
        }
        if let Some(dt) = r.dt {
            if !(dt > 0.0 && dt.is_finite()) {
                return bad(format!("dt {dt} is not positive"));
            }
        }
        if !(r.t_end > 0.0 && r.t_end.is_finite()) {
            return bad(format!("t_end {} is not positive", r.t_end));
        }
        if let Some(reference) = r.reference {
            if !r.systems.contains(&reference) {
                return bad(format!("reference {} is not among run.systems", reference.name()));
            }
        }
        let mut seen = std::collections::BTreeSet::new();
        if let Some(s) = r.systems.iter().find(|s| !seen.insert(s.name())) {
            return bad(format!("system {} listed twice", s.name()));
        }
        match &self.initial {
            InitialCondition::Gaussian { sigma, norm, .. } if !(*sigma > 0.0 && *norm > 0.0) => {
                bad("gaussian sigma and norm must be positive".into())
            }
            InitialCondition::GroundState { mass, squeeze, tol, .. }
                if !(*mass > 0.0 && *squeeze > 0.0 && *tol > 0.0) =>
            {
                bad("ground_state mass, squeeze and tol must be positive".into())
            }
            _ => Ok(()),
        }
    }
}
