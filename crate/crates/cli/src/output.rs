//! Plot-ready serialization of scan records: CSV with a fixed column order
//! and lossless 17-significant-digit floats, plus a JSON alternative with
//! identical field names. Absent values (zero-probability cells) are empty
//! CSV fields and JSON nulls.

use std::io::{self, Write};

use duality_core::optimizer::ScanRecord;
use serde::Serialize;

pub const CSV_HEADER: &str =
    "delta,visibility,sigma,outcome_probability,d_opt,d_englert_line,d_natural_line,d_englert_bound";

/// 17 significant digits: enough to round-trip any f64 exactly.
pub fn format_f64(value: f64) -> String {
    format!("{value:.16e}")
}

fn format_opt(value: Option<f64>) -> String {
    value.map(format_f64).unwrap_or_default()
}

pub fn csv_row(record: &ScanRecord) -> String {
    format!(
        "{},{},{},{},{},{},{},{}",
        format_f64(record.delta),
        format_f64(record.visibility),
        record.sigma,
        format_f64(record.outcome_probability),
        format_opt(record.d_opt),
        format_opt(record.d_englert_line),
        format_opt(record.d_natural_line),
        format_f64(record.d_englert_bound),
    )
}

fn parse_field_f64(field: &str, name: &str) -> Result<f64, String> {
    field
        .parse::<f64>()
        .map_err(|e| format!("bad {name} field '{field}': {e}"))
}

fn parse_field_opt(field: &str, name: &str) -> Result<Option<f64>, String> {
    if field.is_empty() {
        Ok(None)
    } else {
        parse_field_f64(field, name).map(Some)
    }
}

/// Parses one data row written by [`csv_row`].
pub fn parse_csv_row(line: &str) -> Result<ScanRecord, String> {
    let fields: Vec<&str> = line.trim_end_matches(['\n', '\r']).split(',').collect();
    if fields.len() != 8 {
        return Err(format!("expected 8 fields, got {}", fields.len()));
    }
    Ok(ScanRecord {
        delta: parse_field_f64(fields[0], "delta")?,
        visibility: parse_field_f64(fields[1], "visibility")?,
        sigma: fields[2]
            .parse::<i32>()
            .map_err(|e| format!("bad sigma field '{}': {e}", fields[2]))?,
        outcome_probability: parse_field_f64(fields[3], "outcome_probability")?,
        d_opt: parse_field_opt(fields[4], "d_opt")?,
        d_englert_line: parse_field_opt(fields[5], "d_englert_line")?,
        d_natural_line: parse_field_opt(fields[6], "d_natural_line")?,
        d_englert_bound: parse_field_f64(fields[7], "d_englert_bound")?,
    })
}

pub fn write_csv<W: Write + ?Sized>(writer: &mut W, records: &[ScanRecord]) -> io::Result<()> {
    writeln!(writer, "{CSV_HEADER}")?;
    for record in records {
        writeln!(writer, "{}", csv_row(record))?;
    }
    Ok(())
}

#[derive(Serialize)]
struct JsonRecord {
    delta: f64,
    visibility: f64,
    sigma: i32,
    outcome_probability: f64,
    d_opt: Option<f64>,
    d_englert_line: Option<f64>,
    d_natural_line: Option<f64>,
    d_englert_bound: f64,
}

impl From<&ScanRecord> for JsonRecord {
    fn from(r: &ScanRecord) -> Self {
        Self {
            delta: r.delta,
            visibility: r.visibility,
            sigma: r.sigma,
            outcome_probability: r.outcome_probability,
            d_opt: r.d_opt,
            d_englert_line: r.d_englert_line,
            d_natural_line: r.d_natural_line,
            d_englert_bound: r.d_englert_bound,
        }
    }
}

pub fn write_json<W: Write + ?Sized>(writer: &mut W, records: &[ScanRecord]) -> io::Result<()> {
    let rows: Vec<JsonRecord> = records.iter().map(JsonRecord::from).collect();
    serde_json::to_writer_pretty(&mut *writer, &rows)?;
    writeln!(writer)
}

/// Single-cell report: the scan columns plus the duality-bound residual
/// `d_opt² + V² − 1`.
pub fn write_point_csv<W: Write + ?Sized>(
    writer: &mut W,
    record: &ScanRecord,
    residual: Option<f64>,
) -> io::Result<()> {
    writeln!(writer, "{CSV_HEADER},duality_residual")?;
    writeln!(writer, "{},{}", csv_row(record), format_opt(residual))
}

#[derive(Serialize)]
struct JsonPointReport {
    #[serde(flatten)]
    record: JsonRecord,
    duality_residual: Option<f64>,
}

pub fn write_point_json<W: Write + ?Sized>(
    writer: &mut W,
    record: &ScanRecord,
    residual: Option<f64>,
) -> io::Result<()> {
    let report = JsonPointReport {
        record: JsonRecord::from(record),
        duality_residual: residual,
    };
    serde_json::to_writer_pretty(&mut *writer, &report)?;
    writeln!(writer)
}
