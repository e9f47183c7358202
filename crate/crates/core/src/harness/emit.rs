//! CSV and JSON output of sweep rows.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use super::run::SweepRow;
use crate::error::{Error, Result};

pub const CSV_HEADER: &str = "x,mean_cost,std_error,r_h,n_runs,n_excluded";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(Error::param(format!("unknown output format {s:?}"))),
        }
    }
}

/// Positional decimal with 17 significant digits.
pub fn format_real(v: f64) -> String {
    if !v.is_finite() {
        return if v.is_nan() {
            "NaN".into()
        } else if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    if v == 0.0 {
        return "0".into();
    }
    let magnitude = v.abs().log10().floor() as i32;
    let decimals = (16 - magnitude).max(0) as usize;
    format!("{v:.decimals$}")
}

pub fn to_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let r_h = r.r_h.map(format_real).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            format_real(r.x),
            format_real(r.mean_cost),
            format_real(r.std_error),
            r_h,
            r.n_runs,
            r.n_excluded
        );
    }
    out
}

pub fn to_json(rows: &[SweepRow]) -> Result<String> {
    Ok(serde_json::to_string_pretty(rows)?)
}

pub fn from_json(text: &str) -> Result<Vec<SweepRow>> {
    Ok(serde_json::from_str(text)?)
}

pub fn render(rows: &[SweepRow], format: Format) -> Result<String> {
    match format {
        Format::Csv => Ok(to_csv(rows)),
        Format::Json => to_json(rows),
    }
}

/// Writes the rows to `path` in the given format.
pub fn emit(rows: &[SweepRow], format: Format, path: &Path) -> Result<()> {
    if rows.is_empty() {
        return Err(Error::param("nothing to emit"));
    }
    std::fs::write(path, render(rows, format)?).map_err(|e| Error::io(path, e))
}
