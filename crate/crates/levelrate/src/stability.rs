//! Descent monitoring over recorded trajectories: the energy decay rate,
//! first-order descent prediction, monotonicity, and boundedness checks.

use serde::{Deserialize, Serialize};

use crate::optimizer::Trajectory;
use crate::{Error, ParamVector, Result};

/// Energy decay rate `-alpha * |g|^2`; non-positive for every positive rate,
/// zero exactly at critical points.
pub fn lyapunov_rate(alpha: f64, g: &ParamVector) -> Result<f64> {
    if alpha <= 0.0 || !alpha.is_finite() {
        return Err(Error::Parameter(format!("rate must be positive and finite, got {alpha}")));
    }
    Ok(-alpha * g.norm_sq())
}

/// First-order prediction of the next loss under the gradient-norm-adaptive
/// step: `loss - |g|^2 / (1 + |g|)`. Never exceeds the input loss.
pub fn predicted_descent(loss: f64, g: &ParamVector) -> f64 {
    let norm = g.norm();
    loss - norm * norm / (1.0 + norm)
}

/// A step where the loss rose by more than the allowed slack.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    /// Step index the increase was observed at (the arriving record).
    pub t: usize,
    /// Observed loss increase.
    pub observed: f64,
    /// Allowed slack it exceeded.
    pub allowed: f64,
}

/// Outcome of the boundedness scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundednessResult {
    pub bounded: bool,
    pub delta: f64,
    pub epsilon: f64,
    /// Whether the start point was within `delta` of the reference; when it
    /// is not, the check holds vacuously.
    pub premise_holds: bool,
}

/// Descent diagnostics for one trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub steps_checked: usize,
    pub violations: Vec<Violation>,
    /// Largest excess over the allowed slack; zero when monotone.
    pub max_violation: f64,
    pub monotone: bool,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bounded: Option<BoundednessResult>,
}

/// Flags every step whose loss rose by more than `tol`.
pub fn check_monotone(traj: &Trajectory, tol: f64) -> Result<StabilityReport> {
    if tol < 0.0 || !tol.is_finite() {
        return Err(Error::Parameter(format!("tolerance must be >= 0 and finite, got {tol}")));
    }
    if traj.len() < 2 {
        return Err(Error::Input(format!(
            "monotonicity needs at least 2 records, got {}",
            traj.len()
        )));
    }
    let mut violations = Vec::new();
    let mut max_violation: f64 = 0.0;
    for pair in traj.records.windows(2) {
        let observed = pair[1].loss - pair[0].loss;
        if observed > tol {
            violations.push(Violation { t: pair[1].t, observed, allowed: tol });
            max_violation = max_violation.max(observed - tol);
        }
    }
    Ok(StabilityReport {
        steps_checked: traj.len() - 1,
        monotone: violations.is_empty(),
        violations,
        max_violation,
        tolerance: tol,
        bounded: None,
    })
}

/// True iff starting within `delta` of `x_star` keeps every iterate within
/// `epsilon`; vacuously true when the start is already outside `delta`.
pub fn boundedness_check(
    traj: &Trajectory,
    x_star: &ParamVector,
    delta: f64,
    epsilon: f64,
) -> Result<bool> {
    if !delta.is_finite() || delta <= 0.0 || !epsilon.is_finite() || epsilon <= 0.0 {
        return Err(Error::Parameter(format!(
            "boundedness radii must be positive, got delta = {delta}, epsilon = {epsilon}"
        )));
    }
    if traj.is_empty() {
        return Err(Error::Input("boundedness needs a non-empty trajectory".into()));
    }
    let snapshots: Option<Vec<&ParamVector>> = traj.records.iter().map(|r| r.x.as_ref()).collect();
    let Some(snapshots) = snapshots else {
        return Err(Error::Input("trajectory does not store iterate snapshots".into()));
    };
    if snapshots[0].dim() != x_star.dim() {
        return Err(Error::Dimension(format!(
            "reference point has dimension {}, trajectory has {}",
            x_star.dim(),
            snapshots[0].dim()
        )));
    }
    if snapshots[0].distance(x_star) >= delta {
        return Ok(true);
    }
    Ok(snapshots.iter().all(|x| x.distance(x_star) < epsilon))
}

/// Monotonicity plus an optional boundedness scan in one report.
pub fn analyze(
    traj: &Trajectory,
    tol: f64,
    bound: Option<(&ParamVector, f64, f64)>,
) -> Result<StabilityReport> {
    let mut report = check_monotone(traj, tol)?;
    if let Some((x_star, delta, epsilon)) = bound {
        let bounded = boundedness_check(traj, x_star, delta, epsilon)?;
        let premise_holds = traj
            .records
            .first()
            .and_then(|r| r.x.as_ref())
            .map(|x0| x0.distance(x_star) < delta)
            .unwrap_or(false);
        report.bounded = Some(BoundednessResult { bounded, delta, epsilon, premise_holds });
    }
    Ok(report)
}
