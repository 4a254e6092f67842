//! Orchestration of ε-sweeps and comparisons between systems.

use super::config::{ExperimentConfig, InitialCondition, PhiInit};
use crate::error::{Error, Result};
use crate::io::manifest::{self, Manifest, RunEntry};
use crate::io::plot::{self, Series};
use crate::io::tables::{self, SweepRow};
use crate::io::Snapshot;
use crate::spectral::{
    compare_trajectories, gaussian_real, integrate, ComplexState, Frame, Grid, Run, Solver, SolverConfig,
    Spectral, System,
};
use crate::stationary::imaginary_time_ground;
use num_complex::Complex64;
use rayon::prelude::*;
use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

/// Least-squares slope of `log y` against `log x`.
pub fn fit_slope(points: &[(f64, f64)]) -> Result<f64> {
    let logs: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if logs.len() < 2 {
        return Err(Error::Domain("slope fit needs two positive points".into()));
    }
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Domain("slope fit needs distinct abscissae".into()));
    }
    Ok(sxy / sxx)
}

/// Wavenumber on the grid closest to `k`.
pub fn grid_wavenumber(grid: &Grid, k: f64) -> f64 {
    let dk = 2.0 * std::f64::consts::PI / grid.length;
    (k / dk).round() * dk
}

fn boost(grid: &Grid, s: &mut ComplexState, k: f64) {
    if k == 0.0 {
        return;
    }
    let k = grid_wavenumber(grid, k);
    for (i, z) in s.psi.iter_mut().enumerate() {
        *z *= Complex64::from_polar(1.0, k * grid.position(i)[0]);
    }
}

/// Trigonometric interpolation of `f(s x)` along one axis.
fn resample_axis(grid: &Grid, f: &[Complex64], axis: usize, s: f64) -> Vec<Complex64> {
    let n = grid.n;
    let stride = n.pow((grid.dim - 1 - axis) as u32);
    let coeff: Vec<Vec<Complex64>> = (0..n)
        .map(|j| {
            let x = s * grid.coordinate(j) + grid.length / 2.0;
            (0..n)
                .map(|k| {
                    // symmetric treatment of the Nyquist mode keeps real data real
                    let m = grid.mode(k);
                    let kk = grid.wavenumber(k);
                    if 2 * m.unsigned_abs() as usize == n {
                        Complex64::new((kk * x).cos(), 0.0)
                    } else {
                        Complex64::from_polar(1.0, kk * x)
                    }
                })
                .collect()
        })
        .collect();
    let mut out = vec![Complex64::new(0.0, 0.0); f.len()];
    let mut line = vec![Complex64::new(0.0, 0.0); n];
    let planner = Spectral::new(Grid::new(1, n, grid.length).expect("valid line grid"));
    for start in 0..f.len() {
        if (start / stride) % n != 0 {
            continue;
        }
        for (j, l) in line.iter_mut().enumerate() {
            *l = f[start + j * stride];
        }
        // coefficients with respect to e^{ik(x + L/2)}
        let hat = planner.forward(&line);
        for (j, c) in coeff.iter().enumerate() {
            let v: Complex64 = c.iter().zip(&hat).map(|(a, b)| a * b).sum();
            out[start + j * stride] = v / n as f64;
        }
    }
    out
}

/// `T`-frame initial state at `T = 0`.
pub fn initial_state(cfg: &ExperimentConfig, grid: &Grid) -> Result<ComplexState> {
    let spec = Spectral::new(grid.clone());
    let poisson = |psi: &[Complex64]| {
        let rho: Vec<f64> = psi.iter().map(|z| z.norm_sqr()).collect();
        spec.inverse_laplacian_zero_mean(&rho)
    };
    let state = match &cfg.initial {
        InitialCondition::Gaussian { sigma, norm, center, boost: k, phi } => {
            let mut s = gaussian_real(grid, *sigma, [*center, 0.0, 0.0], *norm).to_complex();
            s.frame = Frame::T;
            boost(grid, &mut s, *k);
            if *phi == PhiInit::Poisson {
                s.phi = poisson(&s.psi);
            }
            s
        }
        InitialCondition::GroundState { mass, squeeze, boost: k, tol } => {
            let mut s = imaginary_time_ground(grid, *mass, *tol)?.state;
            if *squeeze != 1.0 {
                for axis in 0..grid.dim {
                    s.psi = resample_axis(grid, &s.psi, axis, *squeeze);
                }
                let amp = squeeze.powf(grid.dim as f64 / 2.0);
                s.psi.iter_mut().for_each(|z| *z *= amp);
            }
            boost(grid, &mut s, *k);
            s.phi = poisson(&s.psi);
            s
        }
        InitialCondition::Snapshot { path } => {
            let snap = Snapshot::load(path)?;
            if snap.grid()? != *grid {
                return Err(Error::Config(format!("snapshot {} does not match the configured grid", path.display())));
            }
            let s = snap.to_state()?;
            s.to_frame(Frame::T, snap.epsilon)
        }
    };
    state.check(grid)?;
    Ok(state)
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub id: String,
    pub system: System,
    pub epsilon: f64,
    pub result: std::result::Result<Run, String>,
    pub error_kind: Option<&'static str>,
}

#[derive(Clone, Debug)]
pub struct SweepOutcome {
    pub runs: Vec<RunOutcome>,
    pub table: Vec<SweepRow>,
    pub slopes: BTreeMap<String, f64>,
}

fn run_id(system: System, eps: f64) -> String {
    format!("{}_eps{}", system.name(), eps)
}

/// Runs every (ε, system) pair, in parallel on `workers` threads.
pub fn execute(cfg: &ExperimentConfig, workers: usize) -> Result<SweepOutcome> {
    cfg.validate()?;
    let grid = cfg.grid.build()?;
    let init = initial_state(cfg, &grid)?;
    let jobs: Vec<(f64, System)> = cfg
        .run
        .epsilons
        .iter()
        .flat_map(|&e| cfg.run.systems.iter().map(move |&s| (e, s)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Config(e.to_string()))?;
    let runs: Vec<RunOutcome> = pool.install(|| {
        jobs.par_iter()
            .map(|&(eps, system)| {
                let r = run_one(cfg, &grid, &init, eps, system);
                RunOutcome {
                    id: run_id(system, eps),
                    system,
                    epsilon: eps,
                    error_kind: r.as_ref().err().map(|e| e.kind()),
                    result: r.map_err(|e| e.to_string()),
                }
            })
            .collect()
    });
    let mut out = SweepOutcome { runs, table: Vec::new(), slopes: BTreeMap::new() };
    if let Some(reference) = cfg.run.reference {
        attach_errors(cfg, &grid, reference, &mut out)?;
    }
    Ok(out)
}

fn solver_for(cfg: &ExperimentConfig, grid: &Grid, eps: f64) -> Result<Solver> {
    let mut s = Solver::new(Spectral::new(grid.clone()), eps)?;
    s.dealias = cfg.run.dealias;
    Ok(s)
}

fn run_one(cfg: &ExperimentConfig, grid: &Grid, init: &ComplexState, eps: f64, system: System) -> Result<Run> {
    let solver = solver_for(cfg, grid, eps)?;
    let sc = SolverConfig {
        system,
        epsilon: eps,
        dt: cfg.run.dt_for(eps, grid),
        t_end: cfg.run.t_end,
        scheme: cfg.run.kgw_scheme,
        diagnostics_every: cfg.run.diagnostics_every,
        dealias: cfg.run.dealias,
    };
    if system == System::Nf2 && cfg.run.nf2_transform {
        let start = solver.g1_flow_map(init, -1.0, G1_SUBSTEPS);
        let mut run = integrate(&solver, &sc, &start)?;
        // Samples are reported in the original coordinates.
        run.samples = run.samples.iter().map(|s| solver.g1_flow_map(s, 1.0, G1_SUBSTEPS)).collect();
        return Ok(run);
    }
    integrate(&solver, &sc, init)
}

/// RK4 substeps for the pseudo-time `ε` flow of the first generator.
pub const G1_SUBSTEPS: usize = 16;

fn attach_errors(cfg: &ExperimentConfig, grid: &Grid, reference: System, out: &mut SweepOutcome) -> Result<()> {
    let mut per_system: BTreeMap<String, Vec<(f64, f64)>> = BTreeMap::new();
    for &eps in &cfg.run.epsilons {
        let solver = solver_for(cfg, grid, eps)?;
        let Some(Ok(base)) = out
            .runs
            .iter()
            .find(|r| r.system == reference && r.epsilon == eps)
            .map(|r| r.result.clone())
        else {
            continue;
        };
        for r in out.runs.iter_mut().filter(|r| r.epsilon == eps && r.system != reference) {
            let Ok(run) = r.result.as_mut() else { continue };
            let errors = compare_trajectories(&solver, run, &base, cfg.run.norm)?;
            for (rec, (_, e)) in run.records.iter_mut().zip(&errors) {
                rec.error_vs_ref = Some(*e);
            }
            let row = SweepRow {
                epsilon: eps,
                system: r.system.name().to_string(),
                error_final: errors.last().map_or(f64::NAN, |e| e.1),
                error_sup: errors.iter().map(|e| e.1).fold(0.0, f64::max),
            };
            per_system.entry(row.system.clone()).or_default().push((eps, row.error_final));
            out.table.push(row);
        }
    }
    for (name, pts) in per_system {
        if let Ok(s) = fit_slope(&pts) {
            out.slopes.insert(name, s);
        }
    }
    Ok(())
}

/// Executes `cfg` and writes its artifacts under `out_dir`.
pub fn run_experiment(cfg: &ExperimentConfig, out_dir: &Path, workers: usize) -> Result<Manifest> {
    let started = Instant::now();
    let hash = manifest::config_hash(cfg)?;
    let outcome = execute(cfg, workers)?;
    let grid = cfg.grid.build()?;
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let comment = format!("nfkgw schema_version={} config={hash}", super::config::SCHEMA_VERSION);
    let mut entries = Vec::new();
    let mut files = Vec::new();
    for r in &outcome.runs {
        let mut entry = RunEntry {
            id: r.id.clone(),
            system: r.system.name().to_string(),
            epsilon: r.epsilon,
            status: "ok".into(),
            error: None,
            files: Vec::new(),
        };
        match &r.result {
            Ok(run) => {
                let dir = out_dir.join(&r.id);
                std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
                tables::write_diagnostics(&dir.join("diagnostics.csv"), &comment, &run.records)?;
                entry.files.push(format!("{}/diagnostics.csv", r.id));
                if cfg.output.snapshots {
                    let mut snap = Snapshot::from_state(&grid, run.final_state(), r.epsilon);
                    snap.config_hash = Some(hash.clone());
                    snap.save(&dir.join("final.nfld"))?;
                    entry.files.push(format!("{}/final.nfld", r.id));
                }
                if cfg.output.plots && run.records.len() > 1 {
                    let m0 = run.records[0].mass;
                    let h0 = run.records[0].hamiltonian;
                    let rel = |v: f64, v0: f64| if v0 != 0.0 { (v - v0) / v0.abs() } else { v - v0 };
                    let series = [
                        Series { label: "mass".into(), points: run.records.iter().map(|x| (x.time, rel(x.mass, m0))).collect() },
                        Series {
                            label: "hamiltonian".into(),
                            points: run.records.iter().map(|x| (x.time, rel(x.hamiltonian, h0))).collect(),
                        },
                    ];
                    plot::trace(&dir.join("conservation.svg"), &r.id, "relative drift", &series)?;
                    entry.files.push(format!("{}/conservation.svg", r.id));
                }
            }
            Err(message) => {
                entry.status = "failed".into();
                entry.error = Some(serde_json::json!({ "kind": r.error_kind, "message": message }));
            }
        }
        files.extend(entry.files.iter().cloned());
        entries.push(entry);
    }
    if !outcome.table.is_empty() {
        tables::write_sweep(&out_dir.join("sweep.csv"), &comment, &outcome.table)?;
        files.push("sweep.csv".into());
        if cfg.output.plots && cfg.run.epsilons.len() > 1 {
            let mut by_system: BTreeMap<&str, Vec<(f64, f64)>> = BTreeMap::new();
            for row in &outcome.table {
                by_system.entry(&row.system).or_default().push((row.epsilon, row.error_final));
            }
            let series: Vec<Series> = by_system
                .into_iter()
                .map(|(name, pts)| Series {
                    label: match outcome.slopes.get(name) {
                        Some(s) => format!("{name} (slope {s:.2})"),
                        None => name.to_string(),
                    },
                    points: pts,
                })
                .collect();
            plot::error_vs_epsilon(&out_dir.join("error_vs_epsilon.svg"), &cfg.name, &series)?;
            files.push("error_vs_epsilon.svg".into());
        }
    }
    let toml_text = cfg.to_toml()?;
    std::fs::write(out_dir.join("config.toml"), toml_text).map_err(|e| Error::io(out_dir, e))?;
    files.push("config.toml".into());
    let m = Manifest {
        schema_version: super::config::SCHEMA_VERSION,
        name: cfg.name.clone(),
        config_hash: hash,
        versions: manifest::versions(),
        wall_time_seconds: started.elapsed().as_secs_f64(),
        runs: entries,
        slopes: outcome.slopes.clone(),
        files,
    };
    m.save(&out_dir.join("manifest.json"))?;
    if let Some(failed) = outcome.runs.iter().find(|r| r.result.is_err()) {
        return Err(Error::Solver {
            step: 0,
            message: format!("run {} failed: {}", failed.id, failed.result.as_ref().unwrap_err()),
        });
    }
    Ok(m)
}
