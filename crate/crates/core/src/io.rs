//! On-disk field format: a JSON header with the grid metadata next to a CSV
//! table of coefficients with columns `s_index, mode_k, component, re, im`.
//! Rows whose coefficient is exactly zero are omitted; missing rows read as zero.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cylinder::Cylinder;
use crate::error::{CylError, Result};
use crate::field::SpectralField;

pub const FIELD_FORMAT: &str = "cyllab-field";
pub const FIELD_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FieldHeader {
    pub format: String,
    pub version: u32,
    pub cylinder: Cylinder,
    pub ball_constrained: bool,
    /// Coefficient table, relative to the header's directory.
    pub coefficients: String,
}

#[derive(Debug, Serialize, Deserialize)]
struct CoeffRow {
    s_index: usize,
    mode_k: i64,
    component: usize,
    re: f64,
    im: f64,
}

/// Writes `path` (JSON header) and the coefficient CSV next to it.
pub fn write_field(u: &SpectralField, path: &Path) -> Result<()> {
    let csv_path = path.with_extension("csv");
    let csv_name = csv_path
        .file_name()
        .and_then(|n| n.to_str())
        .ok_or_else(|| CylError::Parse(format!("bad field path {}", path.display())))?
        .to_string();
    let header = FieldHeader {
        format: FIELD_FORMAT.into(),
        version: FIELD_VERSION,
        cylinder: *u.cylinder(),
        ball_constrained: u.ball_constrained,
        coefficients: csv_name,
    };
    let mut f = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut f, &header)?;
    f.write_all(b"\n")?;
    f.flush()?;
    write_coefficients(u, File::create(&csv_path)?)
}

pub fn write_coefficients<W: std::io::Write>(u: &SpectralField, out: W) -> Result<()> {
    let cyl = u.cylinder();
    let mut w = csv::Writer::from_writer(BufWriter::new(out));
    for j in 0..cyl.s_samples() {
        for k in cyl.modes() {
            for c in 0..cyl.ambient_dim() {
                let z = u.coeff(j, k, c);
                if z.re != 0.0 || z.im != 0.0 {
                    w.serialize(CoeffRow { s_index: j, mode_k: k, component: c, re: z.re, im: z.im })?;
                }
            }
        }
    }
    w.flush()?;
    Ok(())
}

pub fn read_field(path: &Path) -> Result<SpectralField> {
    let header: FieldHeader = serde_json::from_reader(BufReader::new(File::open(path)?))?;
    if header.format != FIELD_FORMAT {
        return Err(CylError::Parse(format!("unknown field format {:?}", header.format)));
    }
    let dir: PathBuf = path.parent().map(Path::to_path_buf).unwrap_or_default();
    let mut u = read_coefficients(header.cylinder, File::open(dir.join(&header.coefficients))?)?;
    u.ball_constrained = header.ball_constrained;
    Ok(u)
}

pub fn read_coefficients<R: std::io::Read>(cyl: Cylinder, input: R) -> Result<SpectralField> {
    let mut u = SpectralField::zeros(cyl);
    let mut rdr = csv::Reader::from_reader(BufReader::new(input));
    for row in rdr.deserialize() {
        let row: CoeffRow = row?;
        if row.s_index >= cyl.s_samples() || row.component >= cyl.ambient_dim() {
            return Err(CylError::Parse(format!(
                "row (s_index {}, component {}) outside grid",
                row.s_index, row.component
            )));
        }
        if cyl.mode_index(row.mode_k).is_none() {
            return Err(CylError::Band { k: row.mode_k, lo: cyl.k_min(), hi: cyl.k_max() });
        }
        *u.coeff_mut(row.s_index, row.mode_k, row.component) = Complex64::new(row.re, row.im);
    }
    Ok(u)
}
