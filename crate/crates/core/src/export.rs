//! Artifact writers: RFC-4180 CSV and JSON documents with a pinned float
//! format, so a rerun of the same computation reproduces every output file
//! byte for byte.

use serde::Serialize;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ExportError {
    #[error("row {row} has {got} fields, header has {expected}")]
    RaggedRow { row: usize, got: usize, expected: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Scientific notation with 17 significant digits — enough to reconstruct
/// the exact f64 on read-back, and identical on every rerun.
pub fn float_cell(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes a CSV file per RFC 4180: mandatory header, CRLF row endings,
/// fields quoted only when they contain separators, quotes or line breaks.
pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<(), ExportError> {
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::CRLF)
        .from_writer(BufWriter::new(File::create(path)?));
    writer.write_record(header)?;
    for (i, row) in rows.iter().enumerate() {
        if row.len() != header.len() {
            return Err(ExportError::RaggedRow {
                row: i,
                got: row.len(),
                expected: header.len(),
            });
        }
        writer.write_record(row)?;
    }
    writer.flush()?;
    Ok(())
}

/// Serializes `value` as pretty-printed JSON with a trailing newline.
/// Struct fields keep their declaration order; callers should prefer sorted
/// maps so the output stays deterministic.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), ExportError> {
    let mut out = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut out, value)?;
    out.write_all(b"\n")?;
    out.flush()?;
    Ok(())
}
