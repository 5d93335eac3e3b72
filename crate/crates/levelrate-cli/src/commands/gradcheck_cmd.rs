//! The `gradcheck` command: verify every built-in gradient against the
//! central-difference oracle and write the results.

use std::path::Path;

use crate::artifacts::{
    prepare_dir, unix_now, version_string, write_json, RunManifest, RunOutcome,
};
use crate::gradcheck::{builtin_targets, run_gradcheck};
use crate::{CliError, ExitCode};

pub fn run_gradcheck_command(
    out_dir: &Path,
    points: usize,
    seed: u64,
) -> Result<ExitCode, CliError> {
    prepare_dir(out_dir)?;
    let started = unix_now();
    let targets = builtin_targets(seed)?;
    let report = run_gradcheck(&targets, points, seed)?;
    write_json(&out_dir.join("gradcheck.json"), &report)?;

    let manifest = RunManifest {
        version: version_string(),
        status: RunOutcome::Completed,
        started_unix: started,
        finished_unix: unix_now(),
        config: serde_json::json!({ "command": "gradcheck", "points": points, "seed": seed }),
        artifacts: vec!["gradcheck.json".into()],
        note: (!report.all_pass).then(|| "gradient check failures recorded".to_string()),
    };
    manifest.write_atomic(out_dir)?;

    for entry in &report.entries {
        eprintln!(
            "gradcheck {}: max rel error {:.3e} (tolerance {:.0e}) {}",
            entry.name,
            entry.max_rel_error,
            entry.tolerance,
            if entry.pass { "ok" } else { "FAIL" }
        );
    }
    if report.all_pass {
        Ok(ExitCode::Success)
    } else {
        let offenders: Vec<&str> =
            report.entries.iter().filter(|e| !e.pass).map(|e| e.name.as_str()).collect();
        eprintln!("gradient check failed for: {}", offenders.join(", "));
        Ok(ExitCode::CheckFailed)
    }
}
