//! Batch front-end: configuration, execution and report files.

pub mod config;
pub mod run;
mod selftest;

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};

pub use config::{CommandConfig, ConfigError, GridConfig, RunConfig};
pub use run::{run, CsvRow, Outcome, EXIT_HYPOTHESIS, EXIT_INVALID, EXIT_NUMERICAL, EXIT_PASSED};

/// `report.json` → `report.csv`; other names get `.csv` appended.
pub fn csv_path(json_path: &Path) -> PathBuf {
    if json_path.extension().is_some_and(|e| e == "json") {
        json_path.with_extension("csv")
    } else {
        let mut s = json_path.as_os_str().to_owned();
        s.push(".csv");
        PathBuf::from(s)
    }
}

pub fn default_out(command: &CommandConfig) -> PathBuf {
    PathBuf::from(format!("subord-{}.json", command.name()))
}

/// Writes the JSON report and the CSV summary; returns both paths.
pub fn write_outputs(outcome: &Outcome, json_path: &Path) -> Result<(PathBuf, PathBuf)> {
    let text = serde_json::to_string_pretty(&outcome.report)? + "\n";
    fs::write(json_path, text).with_context(|| format!("writing {}", json_path.display()))?;
    let csv_out = csv_path(json_path);
    let mut w = csv::Writer::from_path(&csv_out).with_context(|| format!("writing {}", csv_out.display()))?;
    if outcome.rows.is_empty() {
        w.write_record([
            "case_id",
            "test_function",
            "p_or_exponents",
            "epsilon",
            "lhs_norm",
            "rhs_norm",
            "ratio",
            "constant",
            "passed",
        ])?;
    }
    for row in &outcome.rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok((json_path.to_path_buf(), csv_out))
}
