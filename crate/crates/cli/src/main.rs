use clap::{Parser, Subcommand, ValueEnum};
use nfkgw_core::algebra::Style;
use nfkgw_core::error::{Error, Result};
use nfkgw_core::io::{tables, Manifest, Snapshot};
use nfkgw_core::lab::{run_experiment, ExperimentConfig};
use nfkgw_core::normal_form::{normal_form, report_json, report_text};
use nfkgw_core::spectral::Grid;
use nfkgw_core::stationary::{profile_to_grid, shoot_radial};
use nfkgw_core::units::{convert_units, Constants};
use serde_json::json;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

/// Output root used when `--out` is absent.
const OUT_ROOT_VAR: &str = "NF_OUT_ROOT";

#[derive(Parser)]
#[command(name = "nf", version, about = "Normal forms and numerics for the Klein-Gordon-Wave system")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, ValueEnum)]
enum ReportFormat {
    Text,
    Latex,
    Json,
}

/// What `simulate`, `compare` and `sweep` print on stdout. `svg` also forces
/// plot output regardless of the config.
#[derive(Copy, Clone, ValueEnum, PartialEq)]
enum RunFormat {
    Csv,
    Svg,
    Json,
}

#[derive(clap::Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    #[arg(long, value_enum, default_value = "json")]
    format: RunFormat,
}

#[derive(Subcommand)]
enum Command {
    /// Computes the normal form up to the given order.
    NormalForm {
        #[arg(long, default_value_t = 2)]
        order: usize,
        #[arg(long, value_enum, default_value = "text")]
        format: ReportFormat,
    },
    /// Runs every system and ε of a config.
    Simulate(RunArgs),
    /// Like `simulate`, measuring errors against `run.reference`.
    Compare(RunArgs),
    /// ε-sweep with fitted slopes; needs a reference and two or more ε.
    Sweep(RunArgs),
    /// Radial stationary state with `j` nodes, exported as CSV and NFLD1.
    Stationary {
        #[arg(long, default_value_t = 0)]
        nodes: usize,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Scaling `α` applied before export; the mass becomes `α`.
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
        #[arg(long, default_value_t = 32)]
        points: usize,
        #[arg(long, default_value_t = 16.0)]
        box_length: f64,
    },
    /// Dimensionless parameters for particle mass and total mass.
    ConvertUnits {
        /// grams
        #[arg(long)]
        particle_mass: f64,
        /// grams
        #[arg(long, conflicts_with = "total_mass_solar", required_unless_present = "total_mass_solar")]
        total_mass: Option<f64>,
        #[arg(long)]
        total_mass_solar: Option<f64>,
        /// TOML with a `[constants]` table.
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            let message = e.render().to_string();
            let first = message.lines().next().unwrap_or("").trim_start_matches("error: ");
            return fail("usage_error", first, 2);
        }
    };
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(e.kind(), &e.to_string(), 1),
    }
}

fn fail(kind: &str, message: &str, code: u8) -> ExitCode {
    eprintln!("{}", json!({ "error": { "kind": kind, "message": message } }));
    ExitCode::from(code)
}

fn dispatch(cmd: Command) -> Result<()> {
    match cmd {
        Command::NormalForm { order, format } => {
            if order == 0 {
                return Err(Error::Domain("order must be at least 1".into()));
            }
            let r = normal_form(order)?;
            match format {
                ReportFormat::Text => print!("{}", report_text(&r, Style::Text)),
                ReportFormat::Latex => print!("{}", report_text(&r, Style::Latex)),
                ReportFormat::Json => println!("{}", pretty(&report_json(&r))?),
            }
            Ok(())
        }
        Command::Simulate(a) => experiment(a, Mode::Simulate),
        Command::Compare(a) => experiment(a, Mode::Compare),
        Command::Sweep(a) => experiment(a, Mode::Sweep),
        Command::Stationary { nodes, tol, out, scale, points, box_length } => {
            stationary(nodes, tol, out, scale, points, box_length)
        }
        Command::ConvertUnits { particle_mass, total_mass, total_mass_solar, config } => {
            let constants = match config {
                Some(p) => load_constants(&p)?,
                None => Constants::default(),
            };
            let total = match (total_mass, total_mass_solar) {
                (Some(m), _) => m,
                (None, Some(s)) => s * constants.solar_mass,
                (None, None) => unreachable!("clap requires one of the two"),
            };
            let p = convert_units(particle_mass, total, &constants)?;
            println!("{}", pretty(&serde_json::to_value(p).map_err(fmt_err)?)?);
            Ok(())
        }
    }
}

#[derive(PartialEq)]
enum Mode {
    Simulate,
    Compare,
    Sweep,
}

fn experiment(a: RunArgs, mode: Mode) -> Result<()> {
    let mut cfg = ExperimentConfig::load(&a.config)?;
    if mode != Mode::Simulate && cfg.run.reference.is_none() {
        return Err(Error::Config("run.reference is required for compare and sweep".into()));
    }
    if mode == Mode::Sweep && cfg.run.epsilons.len() < 2 {
        return Err(Error::Config("a sweep needs at least two epsilons".into()));
    }
    if a.format == RunFormat::Svg {
        cfg.output.plots = true;
    }
    let out = output_dir(a.out, &cfg.name);
    let m = run_experiment(&cfg, &out, a.workers)?;
    match a.format {
        RunFormat::Json => println!("{}", pretty(&serde_json::to_value(&m).map_err(fmt_err)?)?),
        RunFormat::Csv => {
            let sweep = out.join("sweep.csv");
            if sweep.exists() {
                print!("{}", std::fs::read_to_string(&sweep).map_err(|e| Error::io(&sweep, e))?);
            } else {
                summary(&m);
            }
        }
        RunFormat::Svg => summary(&m),
    }
    Ok(())
}

fn summary(m: &Manifest) {
    for f in &m.files {
        println!("{f}");
    }
}

fn output_dir(out: Option<PathBuf>, name: &str) -> PathBuf {
    out.unwrap_or_else(|| {
        std::env::var_os(OUT_ROOT_VAR)
            .map(PathBuf::from)
            .unwrap_or_else(|| PathBuf::from("runs"))
            .join(name)
    })
}

fn stationary(nodes: usize, tol: f64, out: Option<PathBuf>, scale: f64, points: usize, box_length: f64) -> Result<()> {
    if !(scale > 0.0) {
        return Err(Error::Domain(format!("scale must be positive, got {scale}")));
    }
    let eig = shoot_radial(nodes, tol)?;
    let profile = eig.profile.rescale(scale);
    let omega = eig.omega * scale * scale;
    let out = output_dir(out, &format!("stationary_{nodes}"));
    std::fs::create_dir_all(&out).map_err(|e| Error::io(&out, e))?;
    let comment = format!("nfkgw stationary nodes={nodes} omega={omega:e} mass={}", profile.normalization);
    tables::write_profile(&out.join("profile.csv"), &comment, &profile)?;
    let grid = Grid::new(3, points, box_length)?;
    let state = profile_to_grid(&profile, &grid)?;
    Snapshot::from_state(&grid, &state, 0.0).save(&out.join("profile.nfld"))?;
    let record = json!({
        "nodes": nodes,
        "omega": omega,
        "mu": (-2.0 * omega).sqrt(),
        "mass": profile.normalization,
        "residual": eig.residual,
        "files": ["profile.csv", "profile.nfld"],
    });
    println!("{}", pretty(&record)?);
    Ok(())
}

fn load_constants(path: &Path) -> Result<Constants> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Constants::from_toml(&text)
}

fn pretty(v: &serde_json::Value) -> Result<String> {
    serde_json::to_string_pretty(v).map_err(fmt_err)
}

fn fmt_err(e: serde_json::Error) -> Error {
    Error::Format(e.to_string())
}
