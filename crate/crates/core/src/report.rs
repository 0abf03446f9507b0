//! CSV and JSON writers for the file interfaces.
//!
//! All output is UTF-8 with LF line endings. Floats are written with the
//! shortest round-trip representation, so identical values always produce
//! identical bytes.

use std::io::Write;

use crate::dgp::SimPath;
use crate::error::{Error, Result};
use crate::experiments::RateStudyReport;
use crate::forecaster::ForecastTrace;

fn io_err(e: std::io::Error) -> Error {
    Error::InvalidArgument(format!("write failed: {e}"))
}

/// `t,y,h` rows, one per path index (index 0 carries the initial values).
pub fn write_path_csv<W: Write>(path: &SimPath, out: &mut W) -> Result<()> {
    writeln!(out, "t,y,h").map_err(io_err)?;
    for t in 0..path.len() {
        writeln!(out, "{},{},{}", t, path.y[t], path.h[t]).map_err(io_err)?;
    }
    Ok(())
}

/// `t,f,d` rows aligned with the driving path.
pub fn write_trace_csv<W: Write>(trace: &ForecastTrace, out: &mut W) -> Result<()> {
    writeln!(out, "t,f,d").map_err(io_err)?;
    for t in 0..trace.f.len() {
        writeln!(out, "{},{},{}", t, trace.f[t], trace.d[t]).map_err(io_err)?;
    }
    Ok(())
}

/// Per-replication rate-study rows: `T,replication,excess,theta_0,...`.
pub fn write_rate_rows_csv<W: Write>(report: &RateStudyReport, out: &mut W) -> Result<()> {
    let p = report.rows.first().map_or(0, |r| r.theta_hat.len());
    let mut header = String::from("T,replication,excess");
    for i in 0..p {
        header.push_str(&format!(",theta_{i}"));
    }
    writeln!(out, "{header}").map_err(io_err)?;
    for row in &report.rows {
        let mut line = format!("{},{},{}", row.t, row.replication, row.excess);
        for v in &row.theta_hat {
            line.push_str(&format!(",{v}"));
        }
        writeln!(out, "{line}").map_err(io_err)?;
    }
    Ok(())
}

/// `lag,acf` rows for an autocorrelation sequence starting at lag 1.
pub fn write_acf_csv<W: Write>(acf: &[f64], out: &mut W) -> Result<()> {
    writeln!(out, "lag,acf").map_err(io_err)?;
    for (i, v) in acf.iter().enumerate() {
        writeln!(out, "{},{}", i + 1, v).map_err(io_err)?;
    }
    Ok(())
}

/// Pretty JSON plus a trailing newline.
pub fn to_json_pretty<T: serde::Serialize>(value: &T) -> Result<String> {
    serde_json::to_string_pretty(value)
        .map(|mut s| {
            s.push('\n');
            s
        })
        .map_err(|e| Error::InvalidArgument(format!("serialization failed: {e}")))
}
