//! File formats.
//!
//! CSV files carry a header line and one record per (t, x):
//!
//! | file kind | columns |
//! |-----------|---------|
//! | profiles  | `t,x,v,u,theta` |
//! | residuals | `t,x,q1,q2` |
//! | kinetic   | `t,x,rho,u1,theta,dist_weighted` |
//!
//! Numbers use Rust's shortest round-trip formatting, so identical runs produce
//! identical bytes.
//!
//! The kinetic dump is little-endian throughout:
//!
//! ```text
//! magic  8 bytes   "WLKDUMP1"
//! n_x    u64       spatial cells
//! n_v    u64       velocity nodes
//! t      f64
//! x      n_x × f64 cell centers
//! xi     n_v × f64 velocity nodes
//! w      n_v × f64 quadrature weights
//! g      n_x·n_v × f64, row-major (cell index slowest)
//! h      n_x·n_v × f64, same layout
//! ```

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::gas::ThermoState;
use crate::kinetic::KineticField;
use crate::profiles::Residuals;

pub const PROFILE_HEADER: &str = "t,x,v,u,theta";
pub const RESIDUAL_HEADER: &str = "t,x,q1,q2";
pub const KINETIC_HEADER: &str = "t,x,rho,u1,theta,dist_weighted";
pub const DUMP_MAGIC: &[u8; 8] = b"WLKDUMP1";

/// One record of the kinetic CSV.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KineticRow {
    pub t: f64,
    pub x: f64,
    pub rho: f64,
    pub u1: f64,
    pub theta: f64,
    pub dist_weighted: f64,
}

pub fn profile_csv<I: IntoIterator<Item = (f64, f64, ThermoState)>>(rows: I) -> String {
    let mut s = String::from(PROFILE_HEADER);
    s.push('\n');
    for (t, x, st) in rows {
        let _ = writeln!(s, "{t},{x},{},{},{}", st.v, st.u, st.theta);
    }
    s
}

pub fn residual_csv(fields: &[Residuals]) -> String {
    let mut s = String::from(RESIDUAL_HEADER);
    s.push('\n');
    for r in fields {
        for ((x, q1), q2) in r.x.iter().zip(&r.q1).zip(&r.q2) {
            let _ = writeln!(s, "{},{x},{q1},{q2}", r.t);
        }
    }
    s
}

pub fn kinetic_csv(rows: &[KineticRow]) -> String {
    let mut s = String::from(KINETIC_HEADER);
    s.push('\n');
    for r in rows {
        let _ = writeln!(s, "{},{},{},{},{},{}", r.t, r.x, r.rho, r.u1, r.theta, r.dist_weighted);
    }
    s
}

/// Header and numeric records of a CSV produced by this module.
pub fn read_csv(text: &str) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut lines = text.lines();
    let header: Vec<String> = lines
        .next()
        .ok_or_else(|| Error::usage("empty CSV"))?
        .split(',')
        .map(str::to_string)
        .collect();
    let mut rows = Vec::new();
    for (no, line) in lines.enumerate() {
        let rec: Vec<f64> = line
            .split(',')
            .map(|c| c.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::usage(format!("CSV line {}: {e}", no + 2)))?;
        if rec.len() != header.len() {
            return Err(Error::usage(format!(
                "CSV line {}: {} fields, header has {}",
                no + 2,
                rec.len(),
                header.len()
            )));
        }
        rows.push(rec);
    }
    Ok((header, rows))
}

pub fn kinetic_dump(field: &KineticField) -> Vec<u8> {
    let nx = field.grid.n;
    let nv = field.velocity.len();
    let mut out = Vec::with_capacity(32 + 8 * (nx + 2 * nv + 2 * nx * nv));
    out.extend_from_slice(DUMP_MAGIC);
    out.extend_from_slice(&(nx as u64).to_le_bytes());
    out.extend_from_slice(&(nv as u64).to_le_bytes());
    let mut put = |v: f64| out.extend_from_slice(&v.to_le_bytes());
    put(field.t);
    (0..nx).for_each(|i| put(field.grid.x(i)));
    field.velocity.nodes.iter().for_each(|&v| put(v));
    field.velocity.weights.iter().for_each(|&v| put(v));
    field.g.iter().for_each(|&v| put(v));
    field.h.iter().for_each(|&v| put(v));
    out
}

/// Decoded kinetic dump.
#[derive(Debug, Clone, PartialEq)]
pub struct KineticDump {
    pub t: f64,
    pub x: Vec<f64>,
    pub xi: Vec<f64>,
    pub w: Vec<f64>,
    pub g: Vec<f64>,
    pub h: Vec<f64>,
}

pub fn read_kinetic_dump(bytes: &[u8]) -> Result<KineticDump> {
    let bad = |m: &str| Error::usage(format!("kinetic dump: {m}"));
    if bytes.len() < 32 || &bytes[..8] != DUMP_MAGIC {
        return Err(bad("missing magic"));
    }
    let word = |k: usize| -> [u8; 8] { bytes[k..k + 8].try_into().expect("8-byte slice") };
    let nx = u64::from_le_bytes(word(8)) as usize;
    let nv = u64::from_le_bytes(word(16)) as usize;
    let want = 8 * (4 + nx + 2 * nv + 2 * nx * nv);
    if bytes.len() != want {
        return Err(bad(&format!("expected {want} bytes, found {}", bytes.len())));
    }
    let mut at = 24;
    let mut take = |m: usize| -> Vec<f64> {
        let v = (0..m).map(|k| f64::from_le_bytes(word(at + 8 * k))).collect();
        at += 8 * m;
        v
    };
    let t = take(1)[0];
    Ok(KineticDump { t, x: take(nx), xi: take(nv), w: take(nv), g: take(nx * nv), h: take(nx * nv) })
}

/// Writes `bytes` to `path`, creating parent directories.
pub fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    let io = |source| Error::Io { path: path.display().to_string(), source };
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir).map_err(io)?;
        }
    }
    std::fs::write(path, bytes).map_err(io)
}

/// File-name tag for one ε, e.g. `1e-3`.
pub fn eps_tag(eps: f64) -> String {
    format!("{eps:e}")
}
