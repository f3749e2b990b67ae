//! Plain CSV output. Floats are written with 17 significant digits so that
//! parsing them back gives the same `f64`.

use std::io::Write;

use purify_core::ensemble::EnsembleSummary;

use crate::error::{CliError, CliResult};

pub const SUMMARY_HEADER: &str = "t,mean_L,stderr_L,n_traj,clip_fraction";
pub const CURVE_HEADER: &str = "t,L";
pub const BOUNDS_HEADER: &str = "D,lower,upper";

pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_summary<W: Write>(out: &mut W, summary: &EnsembleSummary) -> std::io::Result<()> {
    writeln!(out, "{SUMMARY_HEADER}")?;
    for i in 0..summary.sample_times.len() {
        writeln!(
            out,
            "{},{},{},{},{}",
            format_float(summary.sample_times[i]),
            format_float(summary.mean_impurity[i]),
            format_float(summary.stderr_impurity[i]),
            summary.n_traj,
            format_float(summary.clip_fraction)
        )?;
    }
    Ok(())
}

pub fn write_curve<W: Write>(out: &mut W, times: &[f64], values: &[f64]) -> std::io::Result<()> {
    writeln!(out, "{CURVE_HEADER}")?;
    for (&t, &l) in times.iter().zip(values) {
        writeln!(out, "{},{}", format_float(t), format_float(l))?;
    }
    Ok(())
}

/// Rows of `(D, lower, upper)`.
pub fn write_bounds<W: Write>(out: &mut W, rows: &[(usize, f64, f64)]) -> std::io::Result<()> {
    writeln!(out, "{BOUNDS_HEADER}")?;
    for &(d, lo, hi) in rows {
        writeln!(out, "{d},{},{}", format_float(lo), format_float(hi))?;
    }
    Ok(())
}

/// A parsed numeric table.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }
}

pub fn parse(text: &str) -> CliResult<Table> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header: Vec<String> = lines
        .next()
        .ok_or_else(|| CliError::usage("empty CSV"))?
        .split(',')
        .map(|s| s.trim().to_string())
        .collect();
    let rows = lines
        .enumerate()
        .map(|(i, line)| {
            let row = line
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse::<f64>()
                        .map_err(|e| CliError::usage(format!("row {}: {e}", i + 1)))
                })
                .collect::<CliResult<Vec<f64>>>()?;
            if row.len() != header.len() {
                return Err(CliError::usage(format!(
                    "row {} has {} fields, header has {}",
                    i + 1,
                    row.len(),
                    header.len()
                )));
            }
            Ok(row)
        })
        .collect::<CliResult<Vec<_>>>()?;
    Ok(Table { header, rows })
}
