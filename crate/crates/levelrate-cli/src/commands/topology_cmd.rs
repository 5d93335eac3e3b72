//! The `topology` command: sample a 2-D field (slicing higher-dimensional
//! objectives), sweep thresholds in both directions, and run the
//! equiconnectedness comparison when modulation is configured.

use std::path::Path;

use serde::{Deserialize, Serialize};

use levelrate::landscape::{DomainBox, Objective, SliceObjective};
use levelrate::topology::{
    equiconnectedness_check, lambda_ladder, lambda_ladder_over, lambda_sweep, sample_grid,
    ConnectivityReport, EquiReport,
};
use levelrate::ParamVector;

use crate::artifacts::{
    prepare_dir, unix_now, version_string, write_grid_csv, write_json, RunManifest, RunOutcome,
};
use crate::config::{ExperimentConfig, Overrides, TopologySpec};
use crate::{CliError, ExitCode};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TopologyArtifact {
    pub objective: String,
    pub nx: usize,
    pub ny: usize,
    pub bounds: [[f64; 2]; 2],
    pub field_min: f64,
    pub field_max: f64,
    pub sweeps: Vec<ConnectivityReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub equiconnectedness: Option<EquiReport>,
}

pub fn run_topology(config_path: &Path, overrides: &Overrides) -> Result<ExitCode, CliError> {
    let mut config = ExperimentConfig::from_file(config_path)?;
    config.apply_overrides(overrides);
    let out_dir = config.resolved_out_dir()?;
    prepare_dir(&out_dir)?;
    let started = unix_now();
    sweep_in_dir(&config, &out_dir, started).inspect_err(|err| {
        // a failed sweep still leaves a manifest behind, best effort
        let manifest = RunManifest {
            version: version_string(),
            status: RunOutcome::Error,
            started_unix: started,
            finished_unix: unix_now(),
            config: serde_json::to_value(&config).unwrap_or_default(),
            artifacts: Vec::new(),
            note: Some(err.to_string()),
        };
        let _ = manifest.write_atomic(&out_dir);
    })
}

fn sweep_in_dir(
    config: &ExperimentConfig,
    out_dir: &std::path::Path,
    started: u64,
) -> Result<ExitCode, CliError> {
    let topo = config.topology.clone().unwrap_or_default();
    let built = config.build_objective()?;
    let field_obj = as_two_dimensional(built.objective, &topo, config)?;

    let bounds = match topo.bounds {
        Some([[x_lo, x_hi], [y_lo, y_hi]]) => DomainBox::new(vec![x_lo, y_lo], vec![x_hi, y_hi])?,
        None => field_obj.domain().clone(),
    };

    let field = sample_grid(field_obj.as_ref(), &bounds, topo.nx, topo.ny)?;
    write_grid_csv(&out_dir.join("grid.csv"), &field)?;

    let lambdas = match &topo.lambdas {
        Some(explicit) => explicit.clone(),
        None => lambda_ladder(&field, topo.lambda_count)?,
    };
    let sweeps = topo
        .directions
        .iter()
        .map(|direction| lambda_sweep(&field, &lambdas, *direction, topo.adjacency))
        .collect::<Result<Vec<_>, _>>()?;

    // run the modulation comparison when the risk stack modulates over time
    // or the config asks for it explicitly
    let kappa = config.risk.as_ref().map_or(0.0, |r| r.kappa);
    let delta = config.risk.as_ref().map_or(1.0, |r| r.delta);
    let equi = if topo.equiconnectedness.is_some() || kappa > 0.0 {
        let spec = topo.equiconnectedness.clone().unwrap_or_default();
        // thresholds drawn from the widest modulated range, gamma(0) = 1 + kappa
        let widest: Vec<f64> = field.values().iter().map(|v| v * (1.0 + kappa)).collect();
        let equi_lambdas = lambda_ladder_over(&widest, spec.lambda_count)?;
        Some(equiconnectedness_check(
            field_obj.as_ref(),
            &bounds,
            topo.nx,
            topo.ny,
            kappa,
            delta,
            &spec.t_list,
            &equi_lambdas,
            topo.adjacency,
        )?)
    } else {
        None
    };

    let artifact = TopologyArtifact {
        objective: field_obj.name().to_string(),
        nx: topo.nx,
        ny: topo.ny,
        bounds: [[bounds.lo()[0], bounds.hi()[0]], [bounds.lo()[1], bounds.hi()[1]]],
        field_min: field.min(),
        field_max: field.max(),
        sweeps,
        equiconnectedness: equi,
    };
    write_json(&out_dir.join("connectivity.json"), &artifact)?;

    let clean = artifact.equiconnectedness.as_ref().is_none_or(|e| e.is_clean());
    let manifest = RunManifest {
        version: version_string(),
        status: RunOutcome::Completed,
        started_unix: started,
        finished_unix: unix_now(),
        config: serde_json::to_value(config)?,
        artifacts: vec!["grid.csv".into(), "connectivity.json".into()],
        note: (!clean).then(|| "equiconnectedness mismatches recorded".to_string()),
    };
    manifest.write_atomic(out_dir)?;

    eprintln!(
        "topology: {} sweeps over {} thresholds ({})",
        artifact.sweeps.len(),
        lambdas.len(),
        out_dir.display()
    );
    Ok(if clean { ExitCode::Success } else { ExitCode::CheckFailed })
}

/// Objectives with more than two parameters are sliced along two axes at a
/// seeded base point.
fn as_two_dimensional(
    objective: Box<dyn Objective>,
    topo: &TopologySpec,
    config: &ExperimentConfig,
) -> Result<Box<dyn Objective>, CliError> {
    if objective.dim() == 2 {
        return Ok(objective);
    }
    let axes = topo.slice_axes.unwrap_or([0, 1]);
    let base = slice_base_point(objective.as_ref(), config.seed);
    let domain = DomainBox::symmetric(2, 4.0)?;
    Ok(Box::new(SliceObjective::new(objective, base, (axes[0], axes[1]), domain)?))
}

/// Seeded base point for slices: uniform in [-1, 1] per coordinate, a scale
/// where classifier losses are far from softmax saturation.
fn slice_base_point(objective: &dyn Objective, seed: u64) -> ParamVector {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed ^ 0x51ce);
    ParamVector::new((0..objective.dim()).map(|_| rng.random_range(-1.0..1.0)).collect())
        .expect("finite draw")
}
