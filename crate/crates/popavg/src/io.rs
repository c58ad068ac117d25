//! Comma-separated-value writers for data exports.
//!
//! All exports are plain numeric CSV with a header row; float formatting
//! uses shortest round-trip representation so reruns with the same seed
//! produce byte-identical files.

use crate::Result;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

/// Write rows of `f64` cells under a header.
pub fn write_csv<P, I, R>(path: P, header: &[&str], rows: I) -> Result<()>
where
    P: AsRef<Path>,
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = f64>,
{
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "{}", header.join(","))?;
    for row in rows {
        let cells: Vec<String> = row.into_iter().map(fmt_f64).collect();
        writeln!(w, "{}", cells.join(","))?;
    }
    w.flush()?;
    Ok(())
}

/// Shortest round-trip float formatting.
pub fn fmt_f64(x: f64) -> String {
    format!("{x}")
}
