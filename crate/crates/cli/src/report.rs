//! CSV and JSON report writers.
//!
//! CSV reports start with `# key: value` comment lines carrying the
//! [`ReportHeader`], followed by a header row and one record per row.

use std::io::Write;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::campaign::{ReportHeader, TrialFailure};
use crate::evaluate::{TrialRow, CSV_COLUMNS};
use crate::sweep::{SweepAxis, SweepRow, SWEEP_COLUMNS};
use crate::CliError;
use oil_core::Theorem;

pub trait TableRow: Serialize {
    const COLUMNS: &'static [&'static str];
}

impl TableRow for TrialRow {
    const COLUMNS: &'static [&'static str] = &CSV_COLUMNS;
}

impl TableRow for SweepRow {
    const COLUMNS: &'static [&'static str] = &SWEEP_COLUMNS;
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub header: ReportHeader,
    pub rows: Vec<TrialRow>,
    pub failures: Vec<TrialFailure>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub header: ReportHeader,
    pub theorem: Theorem,
    pub axis: SweepAxis,
    pub rows: Vec<SweepRow>,
    pub failures: Vec<TrialFailure>,
}

pub fn csv_bytes<R: TableRow>(header: &ReportHeader, rows: &[R]) -> Result<Vec<u8>, CliError> {
    let mut out = Vec::new();
    writeln!(out, "# {} {} report", header.tool, header.command).unwrap();
    writeln!(out, "# version: {}", header.version).unwrap();
    writeln!(out, "# config_hash: {}", header.config_hash).unwrap();
    writeln!(out, "# seed: {}", header.seed).unwrap();
    writeln!(out, "# rng: {}", header.rng).unwrap();
    writeln!(out, "# tolerances: {}", serde_json::to_string(&header.tolerances).unwrap()).unwrap();
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(R::COLUMNS).map_err(|e| CliError::Other(e.to_string()))?;
    for row in rows {
        w.serialize(row).map_err(|e| CliError::Other(e.to_string()))?;
    }
    w.into_inner().map_err(|e| CliError::Other(e.to_string()))
}

/// Parses the records of a CSV report, skipping the comment preamble.
pub fn parse_csv<R: DeserializeOwned>(text: &str) -> Result<Vec<R>, CliError> {
    csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes())
        .deserialize()
        .collect::<Result<Vec<R>, _>>()
        .map_err(|e| CliError::Other(e.to_string()))
}

pub fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    std::fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}

pub fn json_bytes<T: Serialize>(value: &T) -> Vec<u8> {
    let mut v = serde_json::to_vec_pretty(value).expect("report serializes");
    v.push(b'\n');
    v
}
