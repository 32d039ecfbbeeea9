//! CSV and manifest writers.
//!
//! Floats are written in scientific notation with 17 significant digits so
//! they parse back to the identical `f64`.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

/// Version of every CSV layout below; bump on any header change.
pub const CSV_SCHEMA_VERSION: u32 = 1;

pub const MOMENTS_HEADER: &[&str] = &["t", "p_mean", "p_spread", "theta_mean"];
pub const BANDS_HEADER: &[&str] = &["t", "P_plus", "P_minus"];
pub const DENSITY_P_HEADER: &[&str] = &["t", "p", "density"];
pub const DENSITY_THETA_HEADER: &[&str] = &["t", "j", "theta", "density"];
pub const THEORY_HEADER: &[&str] = &["t", "theta_c", "p_c", "E_plus", "E_minus"];
pub const BRANCHES_HEADER: &[&str] = &["t", "branch", "theta", "p", "weight"];
pub const LZ_SWEEP_HEADER: &[&str] = &["K", "M", "P_theory", "P_num_uniform", "P_num_band", "note"];
pub const SPREAD_HEADER: &[&str] = &["t", "dirac_spinor", "spinless_relativistic", "qkr"];

/// Formats a float with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_string()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{x:.16e}")
    }
}

pub fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

/// Line-oriented CSV writer with a fixed header.
pub struct CsvWriter {
    path: PathBuf,
    out: BufWriter<File>,
    columns: usize,
}

impl CsvWriter {
    pub fn create(path: impl AsRef<Path>, header: &[&str]) -> Result<Self> {
        let path = path.as_ref().to_path_buf();
        let file = File::create(&path).map_err(|e| Error::io(&path, e))?;
        let mut w = Self {
            path,
            out: BufWriter::new(file),
            columns: header.len(),
        };
        w.write_fields(header.iter().map(|s| s.to_string()))?;
        Ok(w)
    }

    pub fn row<I, S>(&mut self, fields: I) -> Result<()>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.write_fields(fields.into_iter().map(Into::into))
    }

    fn write_fields(&mut self, fields: impl Iterator<Item = String>) -> Result<()> {
        let fields: Vec<String> = fields.collect();
        if fields.len() != self.columns {
            return Err(Error::contract(format!(
                "{}: row has {} fields, header has {}",
                self.path.display(),
                fields.len(),
                self.columns
            )));
        }
        let line = fields.join(",");
        writeln!(self.out, "{line}").map_err(|e| Error::io(&self.path, e))
    }

    /// Pushes buffered rows to disk so they survive an interrupted run.
    pub fn flush(&mut self) -> Result<()> {
        self.out.flush().map_err(|e| Error::io(&self.path, e))
    }

    pub fn finish(mut self) -> Result<PathBuf> {
        self.out.flush().map_err(|e| Error::io(&self.path, e))?;
        Ok(self.path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip_exactly() {
        for x in [0.1, -50.0, 1.0 / 3.0, 6.02214076e23, -1e-300, std::f64::consts::PI] {
            let s = fmt_f64(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
        assert_eq!(fmt_f64(f64::NAN), "NaN");
        assert_eq!(fmt_opt(None), "");
        assert_eq!(fmt_f64(0.5), "5.0000000000000000e-1");
    }

    #[test]
    fn writer_checks_width() {
        let dir = tempfile::tempdir().unwrap();
        let mut w = CsvWriter::create(dir.path().join("a.csv"), BANDS_HEADER).unwrap();
        w.row(["0", "1", "0"]).unwrap();
        assert!(w.row(["0", "1"]).is_err());
        let path = w.finish().unwrap();
        let text = std::fs::read_to_string(path).unwrap();
        assert_eq!(text, "t,P_plus,P_minus\n0,1,0\n");
    }
}
