//! NFLD1 snapshots: an ASCII header followed by little-endian `f64` arrays.
//!
//! ```text
//! NFLD1
//! version 1
//! dim 1
//! shape 256
//! length 32
//! fields psi_re psi_im phi pphi
//! time 1
//! frame T
//! epsilon 0.01
//! config 3f5a...        (optional)
//! end
//! <fields.len() × Π shape × 8 bytes>
//! ```

use crate::error::{Error, Result};
use crate::spectral::{ComplexState, Frame, Grid};
use num_complex::Complex64;
use std::io::{BufRead, Write};

pub const MAGIC: &str = "NFLD1";
pub const VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot {
    pub dim: usize,
    pub shape: Vec<usize>,
    pub length: f64,
    pub fields: Vec<(String, Vec<f64>)>,
    pub time: f64,
    pub frame: Frame,
    pub epsilon: f64,
    pub config_hash: Option<String>,
}

const STATE_FIELDS: [&str; 4] = ["psi_re", "psi_im", "phi", "pphi"];

impl Snapshot {
    pub fn from_state(grid: &Grid, s: &ComplexState, epsilon: f64) -> Self {
        Snapshot {
            dim: grid.dim,
            shape: grid.shape(),
            length: grid.length,
            fields: vec![
                ("psi_re".into(), s.psi.iter().map(|z| z.re).collect()),
                ("psi_im".into(), s.psi.iter().map(|z| z.im).collect()),
                ("phi".into(), s.phi.clone()),
                ("pphi".into(), s.pphi.clone()),
            ],
            time: s.time,
            frame: s.frame,
            epsilon,
            config_hash: None,
        }
    }

    pub fn grid(&self) -> Result<Grid> {
        let n = self.shape[0];
        if self.shape.iter().any(|&m| m != n) {
            return Err(Error::Format("only cubic grids are supported".into()));
        }
        Grid::new(self.dim, n, self.length)
    }

    fn field(&self, name: &str) -> Result<&[f64]> {
        self.fields
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.as_slice())
            .ok_or_else(|| Error::Format(format!("snapshot has no field {name}")))
    }

    pub fn to_state(&self) -> Result<ComplexState> {
        let (re, im) = (self.field("psi_re")?, self.field("psi_im")?);
        Ok(ComplexState {
            psi: re.iter().zip(im).map(|(&a, &b)| Complex64::new(a, b)).collect(),
            phi: self.field("phi")?.to_vec(),
            pphi: self.field("pphi")?.to_vec(),
            time: self.time,
            frame: self.frame,
        })
    }

    pub fn write(&self, mut w: impl Write) -> std::io::Result<()> {
        let join = |v: &[usize]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
        writeln!(w, "{MAGIC}")?;
        writeln!(w, "version {VERSION}")?;
        writeln!(w, "dim {}", self.dim)?;
        writeln!(w, "shape {}", join(&self.shape))?;
        writeln!(w, "length {}", self.length)?;
        let names: Vec<&str> = self.fields.iter().map(|(n, _)| n.as_str()).collect();
        writeln!(w, "fields {}", names.join(" "))?;
        writeln!(w, "time {}", self.time)?;
        writeln!(w, "frame {}", self.frame.name())?;
        writeln!(w, "epsilon {}", self.epsilon)?;
        if let Some(h) = &self.config_hash {
            writeln!(w, "config {h}")?;
        }
        writeln!(w, "end")?;
        let mut buf = Vec::with_capacity(self.fields.len() * self.len() * 8);
        for (_, v) in &self.fields {
            for x in v {
                buf.extend_from_slice(&x.to_le_bytes());
            }
        }
        w.write_all(&buf)
    }

    fn len(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn read(mut r: impl BufRead) -> Result<Self> {
        let bad = |m: String| Error::Format(m);
        let mut line = String::new();
        let mut next = |r: &mut dyn BufRead| -> Result<String> {
            line.clear();
            let n = r.read_line(&mut line).map_err(|e| bad(e.to_string()))?;
            if n == 0 {
                return Err(bad("unexpected end of header".into()));
            }
            Ok(line.trim_end_matches('\n').to_string())
        };
        if next(&mut r)? != MAGIC {
            return Err(bad("missing NFLD1 magic".into()));
        }
        let mut keys = std::collections::BTreeMap::new();
        loop {
            let l = next(&mut r)?;
            if l == "end" {
                break;
            }
            let (k, v) = l.split_once(' ').ok_or_else(|| bad(format!("malformed header line {l:?}")))?;
            keys.insert(k.to_string(), v.to_string());
        }
        let get = |k: &str| keys.get(k).ok_or_else(|| bad(format!("header lacks {k}")));
        let num = |k: &str| -> Result<f64> { get(k)?.parse().map_err(|_| bad(format!("bad value for {k}"))) };
        let version: u32 = get("version")?.parse().map_err(|_| bad("bad version".into()))?;
        if version != VERSION {
            return Err(bad(format!("unsupported version {version}")));
        }
        let dim: usize = get("dim")?.parse().map_err(|_| bad("bad dim".into()))?;
        let shape: Vec<usize> = get("shape")?
            .split_whitespace()
            .map(|s| s.parse().map_err(|_| bad("bad shape".into())))
            .collect::<Result<_>>()?;
        if shape.len() != dim || dim == 0 {
            return Err(bad("shape does not match dim".into()));
        }
        let frame = match get("frame")?.as_str() {
            "T" => Frame::T,
            "tau" => Frame::Tau,
            f => return Err(bad(format!("unknown frame {f}"))),
        };
        let names: Vec<String> = get("fields")?.split_whitespace().map(String::from).collect();
        let count: usize = shape.iter().product();
        let mut raw = Vec::new();
        r.read_to_end(&mut raw).map_err(|e| bad(e.to_string()))?;
        if raw.len() != names.len() * count * 8 {
            return Err(bad(format!(
                "payload has {} bytes, header implies {}",
                raw.len(),
                names.len() * count * 8
            )));
        }
        let mut values = raw.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap()));
        let fields = names
            .into_iter()
            .map(|n| (n, values.by_ref().take(count).collect()))
            .collect();
        Ok(Snapshot {
            dim,
            shape,
            length: num("length")?,
            fields,
            time: num("time")?,
            frame,
            epsilon: num("epsilon")?,
            config_hash: keys.get("config").cloned(),
        })
    }

    pub fn save(&self, path: &std::path::Path) -> Result<()> {
        let f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = std::io::BufWriter::new(f);
        self.write(&mut w).and_then(|_| w.flush()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let f = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read(std::io::BufReader::new(f))
    }
}

/// True when the field names are exactly the four state fields.
pub fn is_state(s: &Snapshot) -> bool {
    s.fields.iter().map(|(n, _)| n.as_str()).eq(STATE_FIELDS)
}
