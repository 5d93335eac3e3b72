//! The `report` command: aggregate run manifests under a directory into one
//! summary document.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::artifacts::{artifacts_exist, unix_now, write_json, RunManifest, RunOutcome};
use crate::{CliError, ExitCode};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunSummary {
    pub dir: String,
    pub status: RunOutcome,
    pub version: String,
    pub started_unix: u64,
    pub finished_unix: u64,
    pub artifacts: Vec<String>,
    pub artifacts_present: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepReport {
    pub generated_unix: u64,
    pub runs: Vec<RunSummary>,
    pub completed: usize,
    pub diverged: usize,
    pub error: usize,
}

/// Collects every `manifest.json` directly under `runs_dir`'s children,
/// sorted by directory name for stable output.
pub fn collect_report(runs_dir: &Path) -> Result<SweepReport, CliError> {
    if !runs_dir.is_dir() {
        return Err(CliError::Config(format!("{} is not a directory", runs_dir.display())));
    }
    let mut dirs: Vec<_> = std::fs::read_dir(runs_dir)?
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.is_dir() && p.join("manifest.json").is_file())
        .collect();
    // a run directory may also be passed directly
    if dirs.is_empty() && runs_dir.join("manifest.json").is_file() {
        dirs.push(runs_dir.to_path_buf());
    }
    dirs.sort();

    let mut runs = Vec::new();
    for dir in dirs {
        let manifest = RunManifest::read(&dir)?;
        runs.push(RunSummary {
            dir: dir.display().to_string(),
            status: manifest.status,
            version: manifest.version.clone(),
            started_unix: manifest.started_unix,
            finished_unix: manifest.finished_unix,
            artifacts_present: artifacts_exist(&dir, &manifest),
            artifacts: manifest.artifacts,
        });
    }
    if runs.is_empty() {
        return Err(CliError::Config(format!(
            "no run manifests found under {}",
            runs_dir.display()
        )));
    }
    let count = |status: RunOutcome| runs.iter().filter(|r| r.status == status).count();
    Ok(SweepReport {
        generated_unix: unix_now(),
        completed: count(RunOutcome::Completed),
        diverged: count(RunOutcome::Diverged),
        error: count(RunOutcome::Error),
        runs,
    })
}

pub fn run_report(runs_dir: &Path, out_file: Option<&Path>) -> Result<ExitCode, CliError> {
    let report = collect_report(runs_dir)?;
    match out_file {
        Some(path) => write_json(path, &report)?,
        None => println!("{}", serde_json::to_string_pretty(&report)?),
    }
    eprintln!(
        "report: {} runs ({} completed, {} diverged, {} error)",
        report.runs.len(),
        report.completed,
        report.diverged,
        report.error
    );
    Ok(ExitCode::Success)
}
