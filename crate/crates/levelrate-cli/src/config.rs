//! Experiment configuration: a single JSON document, validated before any
//! compute runs. Unknown keys are rejected. The output directory resolves
//! with precedence flags > `LEVELRATE_OUT` > config file.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use levelrate::landscape::{
    Dataset, Himmelblau, MlpObjective, MlpSpec, Objective, Quadratic, Rosenbrock,
};
use levelrate::loss::{RegKind, RiskConfig};
use levelrate::optimizer::{Method, TunerConfig};
use levelrate::schedule::ExpDecaySchedule;
use levelrate::topology::{Adjacency, Direction};
use levelrate::ParamVector;

use crate::dataset::{load_dataset, synthetic_imbalanced};
use crate::CliError;

pub const OUT_DIR_ENV: &str = "LEVELRATE_OUT";

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub objective: ObjectiveSpec,
    #[serde(default)]
    pub method: MethodSpec,
    #[serde(default)]
    pub risk: Option<RiskSpec>,
    #[serde(default = "default_steps")]
    pub steps: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
    #[serde(default)]
    pub stability: StabilitySpec,
    #[serde(default)]
    pub topology: Option<TopologySpec>,
}

fn default_steps() -> usize {
    200
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ObjectiveSpec {
    Quadratic {
        #[serde(default = "default_dim")]
        dim: usize,
    },
    Rosenbrock,
    Himmelblau,
    Mlp {
        #[serde(default = "default_hidden")]
        hidden: usize,
        dataset: DatasetSpec,
    },
}

fn default_dim() -> usize {
    2
}

fn default_hidden() -> usize {
    8
}

/// Exactly one of `path` or `synthetic` must be set.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetSpec {
    #[serde(default)]
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub synthetic: Option<SyntheticSpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticSpec {
    #[serde(default = "default_samples")]
    pub samples: usize,
}

fn default_samples() -> usize {
    1000
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MethodSpec {
    Fixed {
        alpha: f64,
    },
    ExpDecay {
        #[serde(default = "default_alpha0")]
        alpha0: f64,
        #[serde(default = "default_beta")]
        beta: f64,
    },
    Adaptive,
    Tuner {
        #[serde(default = "default_alpha0")]
        base_alpha0: f64,
        #[serde(default = "default_beta")]
        base_beta: f64,
        #[serde(default)]
        tuner: Option<TunerConfig>,
    },
}

fn default_alpha0() -> f64 {
    ExpDecaySchedule::default().alpha0
}

fn default_beta() -> f64 {
    ExpDecaySchedule::default().beta
}

impl Default for MethodSpec {
    fn default() -> Self {
        MethodSpec::ExpDecay { alpha0: default_alpha0(), beta: default_beta() }
    }
}

/// Risk knobs; class weights default to inverse class frequency
/// `N / (C * count_c)` when unset.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RiskSpec {
    #[serde(default)]
    pub class_weights: Option<Vec<f64>>,
    #[serde(default)]
    pub rho: Option<Vec<f64>>,
    #[serde(default = "default_reg_kind")]
    pub reg_kind: RegKind,
    #[serde(default)]
    pub reg_strength: f64,
    #[serde(default)]
    pub kappa: f64,
    #[serde(default = "default_delta")]
    pub delta: f64,
}

fn default_reg_kind() -> RegKind {
    RegKind::L2
}

fn default_delta() -> f64 {
    1.0
}

impl Default for RiskSpec {
    fn default() -> Self {
        Self {
            class_weights: None,
            rho: None,
            reg_kind: default_reg_kind(),
            reg_strength: 0.0,
            kappa: 0.0,
            delta: default_delta(),
        }
    }
}

impl RiskSpec {
    pub fn resolve(&self, data: &Dataset) -> Result<RiskConfig, CliError> {
        let class_weights = match &self.class_weights {
            Some(w) => w.clone(),
            None => inverse_frequency_weights(data)?,
        };
        let cfg = RiskConfig {
            class_weights,
            rho: self.rho.clone(),
            reg_kind: self.reg_kind,
            reg_strength: self.reg_strength,
            kappa: self.kappa,
            delta: self.delta,
        };
        cfg.validate_for(data)?;
        Ok(cfg)
    }
}

/// `w_c = N / (C * count_c)`; keeps the weighted risk on the scale of the
/// unweighted one while boosting rare classes.
pub fn inverse_frequency_weights(data: &Dataset) -> Result<Vec<f64>, CliError> {
    let counts = data.class_counts();
    let n = data.len() as f64;
    let c = data.classes() as f64;
    counts
        .iter()
        .enumerate()
        .map(|(class, &count)| {
            if count == 0 {
                Err(CliError::Config(format!(
                    "class {class} has no samples; supply class_weights explicitly"
                )))
            } else {
                Ok(n / (c * count as f64))
            }
        })
        .collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StabilitySpec {
    /// Allowed per-step loss increase before a step is flagged.
    #[serde(default = "default_tol")]
    pub tol: f64,
}

fn default_tol() -> f64 {
    1e-12
}

impl Default for StabilitySpec {
    fn default() -> Self {
        Self { tol: default_tol() }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TopologySpec {
    /// `[[x_lo, x_hi], [y_lo, y_hi]]`; defaults to the objective's domain.
    #[serde(default)]
    pub bounds: Option<[[f64; 2]; 2]>,
    #[serde(default = "default_resolution")]
    pub nx: usize,
    #[serde(default = "default_resolution")]
    pub ny: usize,
    #[serde(default = "default_lambda_count")]
    pub lambda_count: usize,
    /// Explicit thresholds; when set, `lambda_count` is ignored.
    #[serde(default)]
    pub lambdas: Option<Vec<f64>>,
    #[serde(default = "default_adjacency")]
    pub adjacency: Adjacency,
    /// Directions to sweep; both by default.
    #[serde(default = "default_directions")]
    pub directions: Vec<Direction>,
    /// For objectives with more than two parameters: which two vary.
    #[serde(default)]
    pub slice_axes: Option<[usize; 2]>,
    #[serde(default)]
    pub equiconnectedness: Option<EquiSpec>,
}

fn default_resolution() -> usize {
    401
}

fn default_lambda_count() -> usize {
    50
}

fn default_adjacency() -> Adjacency {
    Adjacency::Eight
}

fn default_directions() -> Vec<Direction> {
    vec![Direction::Super, Direction::Sub]
}

impl Default for TopologySpec {
    fn default() -> Self {
        Self {
            bounds: None,
            nx: default_resolution(),
            ny: default_resolution(),
            lambda_count: default_lambda_count(),
            lambdas: None,
            adjacency: default_adjacency(),
            directions: default_directions(),
            slice_axes: None,
            equiconnectedness: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EquiSpec {
    #[serde(default = "default_t_list")]
    pub t_list: Vec<f64>,
    #[serde(default = "default_equi_lambda_count")]
    pub lambda_count: usize,
}

fn default_t_list() -> Vec<f64> {
    vec![0.0, 1.0, 5.0]
}

fn default_equi_lambda_count() -> usize {
    20
}

impl Default for EquiSpec {
    fn default() -> Self {
        Self { t_list: default_t_list(), lambda_count: default_equi_lambda_count() }
    }
}

/// Flag-level overrides applied on top of file and environment values.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub out_dir: Option<PathBuf>,
    pub steps: Option<usize>,
    pub seed: Option<u64>,
}

impl ExperimentConfig {
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        let config: ExperimentConfig = serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("invalid config {}: {e}", path.display())))?;
        config.validate()?;
        Ok(config)
    }

    pub fn apply_overrides(&mut self, overrides: &Overrides) {
        if let Ok(dir) = std::env::var(OUT_DIR_ENV) {
            if !dir.is_empty() {
                self.out_dir = Some(PathBuf::from(dir));
            }
        }
        if let Some(dir) = &overrides.out_dir {
            self.out_dir = Some(dir.clone());
        }
        if let Some(steps) = overrides.steps {
            self.steps = steps;
        }
        if let Some(seed) = overrides.seed {
            self.seed = seed;
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.steps == 0 {
            return Err(CliError::Config("steps must be at least 1".into()));
        }
        match &self.objective {
            ObjectiveSpec::Quadratic { dim } if *dim == 0 => {
                return Err(CliError::Config("quadratic dimension must be at least 1".into()));
            }
            ObjectiveSpec::Mlp { hidden, dataset } => {
                if *hidden == 0 {
                    return Err(CliError::Config("mlp hidden width must be at least 1".into()));
                }
                match (&dataset.path, &dataset.synthetic) {
                    (Some(_), Some(_)) => {
                        return Err(CliError::Config(
                            "dataset: set either path or synthetic, not both".into(),
                        ));
                    }
                    (None, None) => {
                        return Err(CliError::Config(
                            "dataset: one of path or synthetic is required".into(),
                        ));
                    }
                    (None, Some(s)) if s.samples < 10 => {
                        return Err(CliError::Config(
                            "synthetic dataset needs at least 10 samples".into(),
                        ));
                    }
                    _ => {}
                }
            }
            _ => {}
        }
        if let MethodSpec::Fixed { alpha } = &self.method {
            if *alpha <= 0.0 || !alpha.is_finite() {
                return Err(CliError::Config(format!(
                    "fixed step size must be positive and finite, got {alpha}"
                )));
            }
        }
        if let Some(t) = &self.topology {
            if t.nx < 2 || t.ny < 2 {
                return Err(CliError::Config("topology resolution must be at least 2".into()));
            }
            if t.lambda_count == 0 {
                return Err(CliError::Config("topology lambda_count must be positive".into()));
            }
            if t.directions.is_empty() {
                return Err(CliError::Config("topology needs at least one direction".into()));
            }
            if let Some(lambdas) = &t.lambdas {
                if lambdas.is_empty() || lambdas.iter().any(|l| !l.is_finite()) {
                    return Err(CliError::Config(
                        "topology lambdas must be non-empty and finite".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn resolved_out_dir(&self) -> Result<PathBuf, CliError> {
        self.out_dir.clone().ok_or_else(|| {
            CliError::Config(format!(
                "no output directory: set out_dir in the config, {OUT_DIR_ENV}, or --out"
            ))
        })
    }

    /// Materializes the dataset when the objective needs one.
    pub fn build_dataset(&self) -> Result<Option<Dataset>, CliError> {
        match &self.objective {
            ObjectiveSpec::Mlp { dataset, .. } => {
                let data = match (&dataset.path, &dataset.synthetic) {
                    (Some(path), None) => load_dataset(path)?,
                    (None, Some(spec)) => synthetic_imbalanced(spec.samples, self.seed)?,
                    _ => unreachable!("validated"),
                };
                Ok(Some(data))
            }
            _ => Ok(None),
        }
    }

    /// Builds the objective, resolving datasets and risk configuration.
    pub fn build_objective(&self) -> Result<BuiltObjective, CliError> {
        match &self.objective {
            ObjectiveSpec::Quadratic { dim } => Ok(BuiltObjective {
                objective: Box::new(Quadratic::new(*dim)?),
                dataset: None,
                risk: None,
            }),
            ObjectiveSpec::Rosenbrock => Ok(BuiltObjective {
                objective: Box::new(Rosenbrock::new()),
                dataset: None,
                risk: None,
            }),
            ObjectiveSpec::Himmelblau => Ok(BuiltObjective {
                objective: Box::new(Himmelblau::new()),
                dataset: None,
                risk: None,
            }),
            ObjectiveSpec::Mlp { hidden, .. } => {
                let data = self.build_dataset()?.expect("mlp always has a dataset");
                let spec = MlpSpec::new(data.num_features(), *hidden, data.classes())?;
                let risk = self.risk.clone().unwrap_or_default().resolve(&data)?;
                let objective = MlpObjective::new(spec, data.clone(), risk.clone())?;
                Ok(BuiltObjective {
                    objective: Box::new(objective),
                    dataset: Some(data),
                    risk: Some(risk),
                })
            }
        }
    }

    pub fn build_method(&self) -> Result<Method, CliError> {
        let method = match &self.method {
            MethodSpec::Fixed { alpha } => Method::Fixed { alpha: *alpha },
            MethodSpec::ExpDecay { alpha0, beta } => {
                Method::ExpDecay(ExpDecaySchedule::new(*alpha0, *beta)?)
            }
            MethodSpec::Adaptive => Method::Adaptive,
            MethodSpec::Tuner { base_alpha0, base_beta, tuner } => {
                let config = tuner.clone().unwrap_or_default();
                config.validate()?;
                Method::Tuner { config, base: ExpDecaySchedule::new(*base_alpha0, *base_beta)? }
            }
        };
        Ok(method)
    }

    /// Deterministic start point for the optimization: uniform in the
    /// objective's domain, driven by the run seed.
    pub fn start_point(&self, objective: &dyn Objective) -> ParamVector {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(self.seed);
        let lo = objective.domain().lo();
        let hi = objective.domain().hi();
        ParamVector::new(
            (0..objective.dim()).map(|i| rng.random_range(lo[i] * 0.8..hi[i] * 0.8)).collect(),
        )
        .expect("domain bounds are finite")
    }
}

/// An objective plus the dataset and risk configuration it was built with.
pub struct BuiltObjective {
    pub objective: Box<dyn Objective>,
    pub dataset: Option<Dataset>,
    pub risk: Option<RiskConfig>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_minimal_config() {
        let json = r#"{"objective": {"kind": "quadratic"}}"#;
        let config: ExperimentConfig = serde_json::from_str(json).unwrap();
        config.validate().unwrap();
        assert_eq!(config.steps, 200);
        assert!(matches!(config.method, MethodSpec::ExpDecay { .. }));
    }

    #[test]
    fn rejects_unknown_keys() {
        let json = r#"{"objective": {"kind": "quadratic"}, "nonsense": 1}"#;
        assert!(serde_json::from_str::<ExperimentConfig>(json).is_err());
        let json = r#"{"objective": {"kind": "quadratic", "bogus": 2}}"#;
        assert!(serde_json::from_str::<ExperimentConfig>(json).is_err());
    }

    #[test]
    fn dataset_spec_needs_exactly_one_source() {
        let json = r#"{"objective": {"kind": "mlp", "dataset": {}}}"#;
        let config: ExperimentConfig = serde_json::from_str(json).unwrap();
        assert!(config.validate().is_err());

        let json = r#"{"objective": {"kind": "mlp", "dataset": {"synthetic": {"samples": 100}}}}"#;
        let config: ExperimentConfig = serde_json::from_str(json).unwrap();
        config.validate().unwrap();
    }

    #[test]
    fn overrides_beat_file_values() {
        let json = r#"{"objective": {"kind": "quadratic"}, "steps": 10, "out_dir": "from_file"}"#;
        let mut config: ExperimentConfig = serde_json::from_str(json).unwrap();
        let overrides =
            Overrides { out_dir: Some(PathBuf::from("from_flag")), steps: Some(42), seed: Some(7) };
        config.apply_overrides(&overrides);
        assert_eq!(config.out_dir.as_deref(), Some(Path::new("from_flag")));
        assert_eq!(config.steps, 42);
        assert_eq!(config.seed, 7);
    }

    #[test]
    fn inverse_frequency_matches_formula() {
        let data = Dataset::from_rows(
            vec![vec![0.0], vec![1.0], vec![2.0], vec![3.0]],
            vec![0, 0, 0, 1],
            2,
        )
        .unwrap();
        let w = inverse_frequency_weights(&data).unwrap();
        assert!((w[0] - 4.0 / (2.0 * 3.0)).abs() < 1e-15);
        assert!((w[1] - 4.0 / (2.0 * 1.0)).abs() < 1e-15);
    }

    #[test]
    fn start_point_is_seeded() {
        let json = r#"{"objective": {"kind": "quadratic"}, "seed": 5}"#;
        let config: ExperimentConfig = serde_json::from_str(json).unwrap();
        let built = config.build_objective().unwrap();
        let a = config.start_point(built.objective.as_ref());
        let b = config.start_point(built.objective.as_ref());
        assert_eq!(a, b);
    }
}
