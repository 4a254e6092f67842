//! Time integration driver with diagnostics and sampled trajectories.

use super::state::{relative_l2, ComplexState, Frame};
use super::systems::{Scheme, Solver, System};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Integration settings. `dt` and `t_end` are in slow time `T = ετ`; the
/// real KGW stepper runs in `τ` with step `dt/ε`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    pub system: System,
    pub epsilon: f64,
    pub dt: f64,
    pub t_end: f64,
    #[serde(default = "default_scheme")]
    pub scheme: Scheme,
    /// Diagnostics and samples every this many steps (0: only the end points).
    #[serde(default)]
    pub diagnostics_every: usize,
    #[serde(default = "default_true")]
    pub dealias: bool,
}

fn default_scheme() -> Scheme {
    Scheme::Strang
}

fn default_true() -> bool {
    true
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.to_string()));
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return bad("epsilon must be positive and finite");
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad("dt must be positive and finite");
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return bad("t_end must be non-negative and finite");
        }
        Ok(())
    }

    /// Number of steps and the adjusted step that lands exactly on `t_end`.
    pub fn steps(&self) -> (usize, f64) {
        let n = (self.t_end / self.dt).round().max(1.0) as usize;
        (n, self.t_end / n as f64)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct DiagnosticsRecord {
    pub step: usize,
    pub time: f64,
    pub mass: f64,
    pub hamiltonian: f64,
    pub error_vs_ref: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct Run {
    pub system: System,
    pub records: Vec<DiagnosticsRecord>,
    /// `T`-frame states at the record times.
    pub samples: Vec<ComplexState>,
}

impl Run {
    pub fn final_state(&self) -> &ComplexState {
        self.samples.last().expect("a run always holds its initial sample")
    }
}

fn energy(solver: &Solver, system: System, s: &ComplexState) -> f64 {
    match system {
        System::Kgw | System::KgwComplex => solver.kgw_energy(&s.to_real(solver.eps)),
        System::Sw => solver.sw_energy(s),
        System::Sp => solver.sp_energy(s),
        System::Nf2 => solver.nf2_energy(s),
    }
}

/// Integrates `initial` (any frame) and records diagnostics.
pub fn integrate(solver: &Solver, cfg: &SolverConfig, initial: &ComplexState) -> Result<Run> {
    cfg.validate()?;
    initial.check(&solver.spec.grid)?;
    let eps = cfg.epsilon;
    let (n, dt) = cfg.steps();
    let every = if cfg.diagnostics_every == 0 { n } else { cfg.diagnostics_every };
    let mut run = Run { system: cfg.system, records: Vec::new(), samples: Vec::new() };
    let mut record = |step: usize, s: ComplexState| {
        run.records.push(DiagnosticsRecord {
            step,
            time: s.time,
            mass: solver.mass(&s.psi),
            hamiltonian: energy(solver, cfg.system, &s),
            error_vs_ref: None,
        });
        run.samples.push(s);
    };
    let fail = |step: usize, s: &ComplexState| -> Result<()> {
        if s.is_finite() {
            Ok(())
        } else {
            Err(Error::Solver { step, message: format!("non-finite state at t = {}", s.time) })
        }
    };
    let start = initial.to_frame(Frame::T, eps);
    fail(0, &start)?;
    record(0, start.clone());
    if cfg.system == System::Kgw {
        let mut r = start.to_real(eps);
        for step in 1..=n {
            solver.step_kgw(&mut r, dt / eps, cfg.scheme);
            if step % every == 0 || step == n {
                let s = r.to_complex().to_frame(Frame::T, eps);
                fail(step, &s)?;
                record(step, s);
            } else if !r.u[0].is_finite() {
                fail(step, &r.to_complex())?;
            }
        }
    } else {
        let mut s = start;
        for step in 1..=n {
            match cfg.system {
                System::KgwComplex => solver.step_kgw_complex(&mut s, dt)?,
                System::Sw => solver.step_sw(&mut s, dt)?,
                System::Sp => solver.step_sp(&mut s, dt)?,
                System::Nf2 => solver.step_nf2(&mut s, dt)?,
                System::Kgw => unreachable!(),
            }
            if step % every == 0 || step == n {
                fail(step, &s)?;
                record(step, s.clone());
            } else if !s.psi[0].re.is_finite() {
                fail(step, &s)?;
            }
        }
    }
    Ok(run)
}

/// Distance used when comparing two trajectories.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Norm {
    /// Relative L2 distance of `Ψ`.
    L2,
    /// Absolute difference of `∫|Ψ|²`.
    MassGap,
    /// Absolute difference of `∫u²` for the real field `u = √2 Re ψ`.
    Observable,
}

/// Per-sample distance between two runs sampled at the same times.
pub fn compare_trajectories(solver: &Solver, a: &Run, b: &Run, norm: Norm) -> Result<Vec<(f64, f64)>> {
    if a.samples.len() != b.samples.len() {
        return Err(Error::Config(format!(
            "trajectories have {} and {} samples",
            a.samples.len(),
            b.samples.len()
        )));
    }
    a.samples
        .iter()
        .zip(&b.samples)
        .map(|(x, y)| {
            if (x.time - y.time).abs() > 1e-9 * x.time.abs().max(1.0) {
                return Err(Error::Config(format!("sample times differ: {} vs {}", x.time, y.time)));
            }
            let d = match norm {
                Norm::L2 => relative_l2(&x.psi, &y.psi),
                Norm::MassGap => (solver.mass(&x.psi) - solver.mass(&y.psi)).abs(),
                Norm::Observable => {
                    let o = |s: &ComplexState| {
                        let u = s.to_real(solver.eps).u;
                        solver.spec.integrate(&u.iter().map(|v| v * v).collect::<Vec<_>>())
                    };
                    (o(x) - o(y)).abs()
                }
            };
            Ok((x.time, d))
        })
        .collect()
}
