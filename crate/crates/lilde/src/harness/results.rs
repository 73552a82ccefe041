//! Result files: plot-ready CSV plus a JSON sidecar carrying everything
//! needed to reproduce the sweep.
//!
//! Floats are written in Rust's shortest round-trip form with a dot
//! decimal separator, independent of locale; parsing a CSV back recovers
//! the exact doubles.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use super::{NoiseSweep, SweepResult};

/// Writes the aggregate rows with the header
/// `variable,mean_evals,std_evals,success_rate,runs`. An empty result
/// list yields a header-only file.
pub fn write_results_csv(results: &[SweepResult], path: &Path) -> io::Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "variable,mean_evals,std_evals,success_rate,runs")?;
    for r in results {
        writeln!(
            out,
            "{},{},{},{},{}",
            r.variable, r.mean_evaluations, r.std_evaluations, r.success_rate, r.runs
        )?;
    }
    out.flush()
}

/// Reads a file produced by [`write_results_csv`].
pub fn read_results_csv(path: &Path) -> io::Result<Vec<SweepResult>> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines();
    let header = lines.next().unwrap_or_default();
    if header != "variable,mean_evals,std_evals,success_rate,runs" {
        return Err(io::Error::new(
            io::ErrorKind::InvalidData,
            format!("unexpected CSV header: {header:?}"),
        ));
    }
    lines
        .map(|line| {
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 5 {
                return Err(io::Error::new(
                    io::ErrorKind::InvalidData,
                    format!("expected 5 fields, got {}: {line:?}", fields.len()),
                ));
            }
            let parse = |s: &str| {
                s.parse::<f64>()
                    .map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))
            };
            Ok(SweepResult {
                variable: parse(fields[0])?,
                mean_evaluations: parse(fields[1])?,
                std_evaluations: parse(fields[2])?,
                success_rate: parse(fields[3])?,
                runs: fields[4]
                    .parse::<usize>()
                    .map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))?,
            })
        })
        .collect()
}

/// Writes the noise sweep in wide form: one row per noise level, one
/// column group per algorithm variant.
pub fn write_noise_csv(sweep: &NoiseSweep, path: &Path) -> io::Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    let mut header = String::from("sigma_rel");
    for arm in &sweep.arms {
        header.push_str(&format!(
            ",{0}_mean_evals,{0}_std_evals,{0}_success_rate",
            arm.label
        ));
    }
    header.push_str(",runs");
    writeln!(out, "{header}")?;
    let sigmas: Vec<f64> = sweep
        .arms
        .first()
        .map(|arm| arm.results.iter().map(|r| r.variable).collect())
        .unwrap_or_default();
    for (row, &sigma) in sigmas.iter().enumerate() {
        let mut line = sigma.to_string();
        for arm in &sweep.arms {
            let r = &arm.results[row];
            line.push_str(&format!(
                ",{},{},{}",
                r.mean_evaluations, r.std_evaluations, r.success_rate
            ));
        }
        line.push_str(&format!(",{}", sweep.runs));
        writeln!(out, "{line}")?;
    }
    out.flush()
}

/// Serializes any sweep report as a pretty-printed JSON sidecar.
pub fn write_sidecar<T: Serialize>(report: &T, path: &Path) -> io::Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut out, report)
        .map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))?;
    out.write_all(b"\n")?;
    out.flush()
}
