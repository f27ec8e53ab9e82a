//! Report files: JSON, CSV tables and two-column plot data.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::CliError;
use crate::run::{Report, ScenarioResult};

pub fn to_json(report: &Report) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(report)?;
    s.push('\n');
    Ok(s)
}

pub fn write_json(report: &Report, dir: &Path) -> Result<(), CliError> {
    let path = dir.join("report.json");
    std::fs::write(&path, to_json(report)?).map_err(|e| CliError::io(&path, e))
}

/// `certificate_{i}.csv`, `szego_{i}.csv` per scenario and one `moments.csv`
/// for all sandwich reports.
pub fn write_csv(report: &Report, dir: &Path) -> Result<(), CliError> {
    let mut moments: Option<csv::Writer<File>> = None;
    for (i, r) in report.results.iter().enumerate() {
        match r {
            ScenarioResult::Theorem41 { certificate, .. }
            | ScenarioResult::Theorem43 { certificate, .. } => {
                let mut w = csv::Writer::from_path(dir.join(format!("certificate_{i}.csv")))?;
                w.write_record(["j", "lhs", "rhs", "margin"])?;
                for row in &certificate.rows {
                    w.serialize((row.j, row.lhs, row.rhs, row.margin))?;
                }
                w.flush().map_err(|e| CliError::io(dir, e))?;
            }
            ScenarioResult::SzegoSweep { trials, .. } => {
                let mut w = csv::Writer::from_path(dir.join(format!("szego_{i}.csv")))?;
                w.write_record(["trial", "lhs", "norm", "c_emp"])?;
                let mut sorted: Vec<_> = trials.iter().collect();
                sorted.sort_by_key(|t| t.trial);
                for t in sorted {
                    w.serialize((t.trial, t.lhs, t.norm, t.c_emp))?;
                }
                w.flush().map_err(|e| CliError::io(dir, e))?;
            }
            ScenarioResult::LtSandwich { reports } => {
                if moments.is_none() {
                    let mut w = csv::Writer::from_path(dir.join("moments.csv"))?;
                    w.write_record([
                        "scenario", "h", "gamma", "kind", "s_lhs", "s_rhs", "gap", "slack", "holds",
                    ])?;
                    moments = Some(w);
                }
                let w = moments.as_mut().expect("just created");
                for s in reports {
                    for m in [&s.upper, &s.lower] {
                        let kind = serde_json::to_value(m.kind)?;
                        w.serialize((
                            i,
                            s.h,
                            m.gamma,
                            kind.as_str().unwrap_or_default(),
                            m.s_lhs,
                            m.s_rhs,
                            m.gap,
                            m.slack,
                            m.holds,
                        ))?;
                    }
                }
            }
            ScenarioResult::GsrCheck { .. } | ScenarioResult::Commutator { .. } => {}
        }
    }
    if let Some(mut w) = moments {
        w.flush().map_err(|e| CliError::io(dir, e))?;
    }
    Ok(())
}

/// Whitespace-separated columns: `margins_{i}.dat` (j, margin),
/// `sandwich_{i}.dat` (h, S, upper, lower), `cemp_{i}.dat` (trial, C_emp) and
/// `bands_{i}.dat` (lo, hi).
pub fn write_plots(report: &Report, dir: &Path) -> Result<(), CliError> {
    for (i, r) in report.results.iter().enumerate() {
        match r {
            ScenarioResult::Theorem41 { certificate, .. }
            | ScenarioResult::Theorem43 { certificate, .. } => {
                let lines = certificate.rows.iter().map(|row| format!("{} {:e}", row.j, row.margin));
                write_lines(&dir.join(format!("margins_{i}.dat")), lines)?;
            }
            ScenarioResult::LtSandwich { reports } => {
                let lines = reports.iter().map(|s| {
                    format!("{} {:e} {:e} {:e}", s.h, s.s_half, s.upper.s_rhs, s.lower.s_lhs)
                });
                write_lines(&dir.join(format!("sandwich_{i}.dat")), lines)?;
            }
            ScenarioResult::SzegoSweep { trials, bands, .. } => {
                let lines = trials
                    .iter()
                    .filter_map(|t| t.c_emp.map(|c| format!("{} {c:e}", t.trial)));
                write_lines(&dir.join(format!("cemp_{i}.dat")), lines)?;
                let lines = bands.iter().map(|b| format!("{:e} {:e}", b.lo, b.hi));
                write_lines(&dir.join(format!("bands_{i}.dat")), lines)?;
            }
            ScenarioResult::GsrCheck { .. } | ScenarioResult::Commutator { .. } => {}
        }
    }
    Ok(())
}

fn write_lines(path: &Path, lines: impl Iterator<Item = String>) -> Result<(), CliError> {
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut w = BufWriter::new(file);
    for line in lines {
        writeln!(w, "{line}").map_err(|e| CliError::io(path, e))?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}
