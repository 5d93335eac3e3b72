//! Artifact files: trajectory CSV, grid CSV, JSON reports, and the run
//! manifest. Floats are printed with 17 significant digits so parsing a CSV
//! back reproduces the in-memory values exactly.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use levelrate::optimizer::{StepRecord, Trajectory};
use levelrate::topology::GridField;

use crate::CliError;

/// 17 significant digits: enough to round-trip any f64.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_trajectory_csv(path: &Path, traj: &Trajectory) -> Result<(), CliError> {
    let mut out = String::from("t,loss,grad_norm,rate,lyapunov_rate\n");
    for r in &traj.records {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.t,
            fmt_f64(r.loss),
            fmt_f64(r.grad_norm),
            fmt_f64(r.rate),
            fmt_f64(r.lyapunov_rate)
        ));
    }
    fs::write(path, out)?;
    Ok(())
}

/// Row of a parsed trajectory CSV; snapshots are not persisted.
pub type TrajectoryRow = (usize, f64, f64, f64, f64);

pub fn read_trajectory_csv(path: &Path) -> Result<Vec<TrajectoryRow>, CliError> {
    let text = fs::read_to_string(path)?;
    let mut rows = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if idx == 0 {
            if line.trim_end_matches('\r') != "t,loss,grad_norm,rate,lyapunov_rate" {
                return Err(CliError::Runtime(format!("unexpected trajectory header: '{line}'")));
            }
            continue;
        }
        let line = line.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 5 {
            return Err(CliError::Runtime(format!(
                "trajectory line {} has {} fields",
                idx + 1,
                fields.len()
            )));
        }
        let parse = |s: &str| -> Result<f64, CliError> {
            s.parse().map_err(|_| {
                CliError::Runtime(format!("trajectory line {}: bad number '{s}'", idx + 1))
            })
        };
        rows.push((
            fields[0]
                .parse()
                .map_err(|_| CliError::Runtime(format!("trajectory line {}: bad step", idx + 1)))?,
            parse(fields[1])?,
            parse(fields[2])?,
            parse(fields[3])?,
            parse(fields[4])?,
        ));
    }
    Ok(rows)
}

/// `x,y,value` rows at every cell center.
pub fn write_grid_csv(path: &Path, field: &GridField) -> Result<(), CliError> {
    let mut out = String::from("x,y,value\n");
    for ix in 0..field.nx() {
        for iy in 0..field.ny() {
            let (x, y) = field.cell_center(ix, iy);
            out.push_str(&format!(
                "{},{},{}\n",
                fmt_f64(x),
                fmt_f64(y),
                fmt_f64(field.value(ix, iy))
            ));
        }
    }
    fs::write(path, out)?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

/// Run outcome recorded in the manifest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RunOutcome {
    Completed,
    Diverged,
    Error,
}

/// Metadata for one run directory; written atomically at run end.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub version: String,
    pub status: RunOutcome,
    pub started_unix: u64,
    pub finished_unix: u64,
    /// Echo of the configuration the run actually used.
    pub config: serde_json::Value,
    /// Artifact files in the run directory, relative names.
    pub artifacts: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

pub fn version_string() -> String {
    format!("levelrate-v{}", env!("CARGO_PKG_VERSION"))
}

pub fn unix_now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

impl RunManifest {
    /// Writes `manifest.json` via a temp file and rename, so readers never
    /// observe a partial document.
    pub fn write_atomic(&self, dir: &Path) -> Result<PathBuf, CliError> {
        let final_path = dir.join("manifest.json");
        let tmp_path = dir.join(".manifest.json.tmp");
        {
            let mut f = fs::File::create(&tmp_path)?;
            let mut text = serde_json::to_string_pretty(self)?;
            text.push('\n');
            f.write_all(text.as_bytes())?;
            f.sync_all()?;
        }
        fs::rename(&tmp_path, &final_path)?;
        Ok(final_path)
    }

    pub fn read(dir: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(dir.join("manifest.json"))?;
        Ok(serde_json::from_str(&text)?)
    }
}

/// Creates the run directory if needed and fails on a file in the way.
pub fn prepare_dir(dir: &Path) -> Result<(), CliError> {
    if dir.exists() && !dir.is_dir() {
        return Err(CliError::Config(format!(
            "output path {} exists and is not a directory",
            dir.display()
        )));
    }
    fs::create_dir_all(dir)?;
    Ok(())
}

/// Double-checks that every artifact named by a manifest is present.
pub fn artifacts_exist(dir: &Path, manifest: &RunManifest) -> bool {
    manifest.artifacts.iter().all(|name| dir.join(name).is_file())
}

pub fn trajectory_matches_rows(traj: &Trajectory, rows: &[TrajectoryRow]) -> bool {
    traj.records.len() == rows.len()
        && traj.records.iter().zip(rows).all(|(r, row)| {
            let StepRecord { t, loss, grad_norm, rate, lyapunov_rate, .. } = r;
            *t == row.0
                && loss.to_bits() == row.1.to_bits()
                && grad_norm.to_bits() == row.2.to_bits()
                && rate.to_bits() == row.3.to_bits()
                && lyapunov_rate.to_bits() == row.4.to_bits()
        })
}
