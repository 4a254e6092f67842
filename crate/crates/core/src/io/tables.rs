//! CSV tables. Each file starts with one `#` comment line carrying the
//! schema version and config hash; the rest is plain CSV.

use crate::error::{Error, Result};
use crate::spectral::DiagnosticsRecord;
use crate::stationary::RadialProfile;
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::Path;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SweepRow {
    pub epsilon: f64,
    pub system: String,
    pub error_final: f64,
    pub error_sup: f64,
}

#[derive(Serialize)]
struct DiagRow {
    step: usize,
    time: f64,
    mass: f64,
    hamiltonian: f64,
    error_vs_ref: String,
}

#[derive(Serialize)]
struct ProfileRow {
    r: f64,
    chi: f64,
    phi: f64,
}

fn to_csv<T: Serialize>(comment: &str, rows: impl IntoIterator<Item = T>) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    writeln!(out, "# {comment}").map_err(|e| Error::Format(e.to_string()))?;
    let mut w = csv::Writer::from_writer(&mut out);
    for r in rows {
        w.serialize(r).map_err(|e| Error::Format(e.to_string()))?;
    }
    w.flush().map_err(|e| Error::Format(e.to_string()))?;
    drop(w);
    Ok(out)
}

fn save(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

pub fn diagnostics_csv(comment: &str, records: &[DiagnosticsRecord]) -> Result<Vec<u8>> {
    to_csv(
        comment,
        records.iter().map(|r| DiagRow {
            step: r.step,
            time: r.time,
            mass: r.mass,
            hamiltonian: r.hamiltonian,
            error_vs_ref: r.error_vs_ref.map(|e| e.to_string()).unwrap_or_default(),
        }),
    )
}

pub fn write_diagnostics(path: &Path, comment: &str, records: &[DiagnosticsRecord]) -> Result<()> {
    save(path, &diagnostics_csv(comment, records)?)
}

pub fn write_sweep(path: &Path, comment: &str, rows: &[SweepRow]) -> Result<()> {
    save(path, &to_csv(comment, rows)?)
}

pub fn write_profile(path: &Path, comment: &str, p: &RadialProfile) -> Result<()> {
    let rows = (0..p.r.len()).map(|i| ProfileRow { r: p.r[i], chi: p.chi[i], phi: p.phi[i] });
    save(path, &to_csv(comment, rows)?)
}

/// Reads a diagnostics table written by [`write_diagnostics`].
pub fn read_diagnostics(path: &Path) -> Result<Vec<DiagnosticsRecord>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    r.records()
        .map(|rec| {
            let rec = rec.map_err(|e| Error::Format(e.to_string()))?;
            let f = |i: usize| -> Result<f64> {
                rec.get(i)
                    .ok_or_else(|| Error::Format("short row".into()))?
                    .parse()
                    .map_err(|_| Error::Format(format!("bad number in column {i}")))
            };
            Ok(DiagnosticsRecord {
                step: f(0)? as usize,
                time: f(1)?,
                mass: f(2)?,
                hamiltonian: f(3)?,
                error_vs_ref: match rec.get(4) {
                    Some("") | None => None,
                    Some(_) => Some(f(4)?),
                },
            })
        })
        .collect()
}
