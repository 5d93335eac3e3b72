//! The `optimize` command: one training run per config, with an optional
//! parallel sweep over several configs.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use levelrate::optimizer::{run_training, RunConfig, RunStatus};
use levelrate::stability::check_monotone;

use crate::artifacts::{
    prepare_dir, unix_now, version_string, write_json, write_trajectory_csv, RunManifest,
    RunOutcome,
};
use crate::config::{ExperimentConfig, Overrides};
use crate::{CliError, ExitCode};

/// Runs one experiment into its resolved output directory.
pub fn run_optimize(config_path: &Path, overrides: &Overrides) -> Result<ExitCode, CliError> {
    let mut config = ExperimentConfig::from_file(config_path)?;
    config.apply_overrides(overrides);
    run_optimize_resolved(&config)
}

fn run_optimize_resolved(config: &ExperimentConfig) -> Result<ExitCode, CliError> {
    let out_dir = config.resolved_out_dir()?;
    prepare_dir(&out_dir)?;
    let started = unix_now();
    run_in_dir(config, &out_dir, started).inspect_err(|err| {
        // a failed run still leaves a manifest behind, best effort
        let manifest = RunManifest {
            version: version_string(),
            status: RunOutcome::Error,
            started_unix: started,
            finished_unix: unix_now(),
            config: serde_json::to_value(config).unwrap_or_default(),
            artifacts: Vec::new(),
            note: Some(err.to_string()),
        };
        let _ = manifest.write_atomic(&out_dir);
    })
}

fn run_in_dir(
    config: &ExperimentConfig,
    out_dir: &Path,
    started: u64,
) -> Result<ExitCode, CliError> {
    let built = config.build_objective()?;
    if let Some(data) = &built.dataset {
        let counts = data.class_counts();
        eprintln!(
            "dataset: {} rows, {} features, class histogram {:?}",
            data.len(),
            data.num_features(),
            counts
        );
    }
    let method = config.build_method()?;
    let x0 = config.start_point(built.objective.as_ref());
    let run = RunConfig { steps: config.steps, store_snapshots: false, ..RunConfig::default() };
    let traj = run_training(built.objective.as_ref(), &method, &x0, &run)?;

    write_trajectory_csv(&out_dir.join("trajectory.csv"), &traj)?;
    let mut artifacts = vec!["trajectory.csv".to_string()];

    if traj.len() >= 2 {
        let stability = check_monotone(&traj, config.stability.tol)?;
        write_json(&out_dir.join("stability.json"), &stability)?;
        artifacts.push("stability.json".to_string());
    }

    let (status, note, exit) = match traj.status {
        RunStatus::Completed => (RunOutcome::Completed, None, ExitCode::Success),
        RunStatus::Diverged { at_step } => (
            RunOutcome::Diverged,
            Some(format!("diverged at step {at_step}; partial trajectory preserved")),
            ExitCode::CheckFailed,
        ),
    };

    let manifest = RunManifest {
        version: version_string(),
        status,
        started_unix: started,
        finished_unix: unix_now(),
        config: serde_json::to_value(config)?,
        artifacts,
        note: note.clone(),
    };
    manifest.write_atomic(out_dir)?;

    match traj.status {
        RunStatus::Completed => eprintln!(
            "completed: {} steps, loss {} -> {} ({})",
            config.steps,
            traj.initial_loss().unwrap_or(f64::NAN),
            traj.final_loss().unwrap_or(f64::NAN),
            out_dir.display()
        ),
        RunStatus::Diverged { .. } => {
            eprintln!("{} ({})", note.unwrap_or_default(), out_dir.display())
        }
    }
    Ok(exit)
}

/// Runs several configs with up to `jobs` worker threads. With more than one
/// config, the resolved output directory becomes a base and each run lands in
/// `<base>/<config stem>`.
pub fn run_optimize_sweep(
    config_paths: &[PathBuf],
    overrides: &Overrides,
    jobs: usize,
) -> Result<ExitCode, CliError> {
    if config_paths.is_empty() {
        return Err(CliError::Config("at least one --config is required".into()));
    }
    if config_paths.len() == 1 {
        return run_optimize(&config_paths[0], overrides);
    }
    let jobs = jobs.max(1);

    // resolve everything up front so config errors surface before any work
    let mut resolved = Vec::new();
    let mut seen_dirs = HashSet::new();
    for path in config_paths {
        let mut config = ExperimentConfig::from_file(path)?;
        config.apply_overrides(overrides);
        let base = config.resolved_out_dir()?;
        let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).ok_or_else(|| {
            CliError::Config(format!("config path {} has no stem", path.display()))
        })?;
        let dir = base.join(stem);
        if !seen_dirs.insert(dir.clone()) {
            return Err(CliError::Config(format!(
                "two configs resolve to the same output directory {}",
                dir.display()
            )));
        }
        config.out_dir = Some(dir);
        resolved.push(config);
    }

    let mut worst = ExitCode::Success;
    for batch in resolved.chunks(jobs) {
        let results: Vec<Result<ExitCode, CliError>> = std::thread::scope(|scope| {
            let handles: Vec<_> = batch
                .iter()
                .map(|config| scope.spawn(move || run_optimize_resolved(config)))
                .collect();
            handles
                .into_iter()
                .map(|h| {
                    h.join()
                        .unwrap_or_else(|_| Err(CliError::Runtime("worker thread panicked".into())))
                })
                .collect()
        });
        for result in results {
            let code = result?;
            if code.code() > worst.code() {
                worst = code;
            }
        }
    }
    Ok(worst)
}
