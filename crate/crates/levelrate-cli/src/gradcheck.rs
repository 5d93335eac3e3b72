//! Gradient verification: every built-in objective's analytic gradient is
//! compared against the central-difference oracle at seeded random points.

use serde::{Deserialize, Serialize};

use levelrate::landscape::{
    finite_diff_grad, Himmelblau, MlpObjective, MlpSpec, Objective, Quadratic, Rosenbrock,
};
use levelrate::loss::{RegKind, RiskConfig};
use levelrate::ParamVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dataset::synthetic_imbalanced;
use crate::CliError;

/// One objective to verify, with its difference step and tolerance.
pub struct GradTarget {
    pub name: String,
    pub objective: Box<dyn Objective>,
    pub h: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GradcheckEntry {
    pub name: String,
    pub points: usize,
    pub max_rel_error: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GradcheckReport {
    pub seed: u64,
    pub entries: Vec<GradcheckEntry>,
    pub all_pass: bool,
}

/// Relative error between the analytic gradient and the oracle:
/// `|a - n| / max(1, |n|)` in the Euclidean norm.
pub fn gradient_rel_error(analytic: &ParamVector, oracle: &ParamVector) -> f64 {
    let diff: f64 =
        analytic.iter().zip(oracle.iter()).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
    diff / oracle.norm().max(1.0)
}

/// The objectives the `gradcheck` command verifies.
pub fn builtin_targets(seed: u64) -> Result<Vec<GradTarget>, CliError> {
    let data = synthetic_imbalanced(40, seed)?;
    let spec = MlpSpec::new(2, 4, 2)?;
    let mlp_plain = MlpObjective::new(spec, data.clone(), RiskConfig::neutral(2))?;

    let weighted = RiskConfig {
        class_weights: vec![0.6, 5.0],
        rho: None,
        reg_kind: RegKind::L2,
        reg_strength: 0.05,
        kappa: 1.0,
        delta: 0.5,
    };
    let mlp_risk = MlpObjective::new(spec, data, weighted)?.with_modulation_time(1.0)?;

    Ok(vec![
        GradTarget {
            name: "quadratic".into(),
            objective: Box::new(Quadratic::new(2)?),
            h: 1e-5,
            tolerance: 1e-8,
        },
        GradTarget {
            name: "rosenbrock".into(),
            objective: Box::new(Rosenbrock::new()),
            h: 1e-6,
            tolerance: 1e-4,
        },
        GradTarget {
            name: "himmelblau".into(),
            objective: Box::new(Himmelblau::new()),
            h: 1e-6,
            tolerance: 1e-4,
        },
        GradTarget {
            name: "mlp-cross-entropy".into(),
            objective: Box::new(mlp_plain),
            h: 1e-5,
            tolerance: 1e-4,
        },
        GradTarget {
            name: "mlp-modulated-risk".into(),
            objective: Box::new(mlp_risk),
            h: 1e-5,
            tolerance: 1e-4,
        },
    ])
}

/// Checks every target at `points` seeded random in-domain points.
pub fn run_gradcheck(
    targets: &[GradTarget],
    points: usize,
    seed: u64,
) -> Result<GradcheckReport, CliError> {
    if points == 0 {
        return Err(CliError::Config("gradcheck needs at least one point".into()));
    }
    let mut entries = Vec::with_capacity(targets.len());
    for (idx, target) in targets.iter().enumerate() {
        let obj = target.objective.as_ref();
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(idx as u64));
        let lo = obj.domain().lo();
        let hi = obj.domain().hi();
        let margin = 10.0 * target.h;
        let mut max_rel_error: f64 = 0.0;
        for _ in 0..points {
            let x = ParamVector::new(
                (0..obj.dim()).map(|i| rng.random_range(lo[i] + margin..hi[i] - margin)).collect(),
            )
            .expect("finite domain bounds");
            let analytic = obj.grad(&x)?;
            let oracle = finite_diff_grad(obj, &x, target.h)?;
            max_rel_error = max_rel_error.max(gradient_rel_error(&analytic, &oracle));
        }
        entries.push(GradcheckEntry {
            name: target.name.clone(),
            points,
            max_rel_error,
            tolerance: target.tolerance,
            pass: max_rel_error <= target.tolerance,
        });
    }
    let all_pass = entries.iter().all(|e| e.pass);
    Ok(GradcheckReport { seed, entries, all_pass })
}

#[cfg(test)]
mod tests {
    use super::*;
    use levelrate::landscape::DomainBox;
    use levelrate::Result;

    #[test]
    fn builtins_all_pass() {
        let targets = builtin_targets(3).unwrap();
        let report = run_gradcheck(&targets, 5, 3).unwrap();
        assert!(report.all_pass, "{report:?}");
        let quad = report.entries.iter().find(|e| e.name == "quadratic").unwrap();
        assert!(quad.max_rel_error <= 1e-8);
    }

    /// Objective whose gradient is deliberately doubled.
    struct BrokenGradient(Quadratic);

    impl Objective for BrokenGradient {
        fn name(&self) -> &str {
            "broken"
        }
        fn dim(&self) -> usize {
            self.0.dim()
        }
        fn domain(&self) -> &DomainBox {
            self.0.domain()
        }
        fn eval(&self, x: &ParamVector) -> Result<f64> {
            self.0.eval(x)
        }
        fn grad(&self, x: &ParamVector) -> Result<ParamVector> {
            Ok(self.0.grad(x)?.scaled(2.0))
        }
    }

    #[test]
    fn broken_gradient_is_caught() {
        let targets = vec![GradTarget {
            name: "broken".into(),
            objective: Box::new(BrokenGradient(Quadratic::new(2).unwrap())),
            h: 1e-5,
            tolerance: 1e-4,
        }];
        let report = run_gradcheck(&targets, 5, 1).unwrap();
        assert!(!report.all_pass);
        assert!(!report.entries[0].pass);
    }
}
