//! Class-weighted, robustness-weighted, regularized empirical risks, and the
//! time-modulated cost built on top of them.

use serde::{Deserialize, Serialize};

use super::{check_model_inputs, sample_nll, sample_nll_grad, LogitModel};
use crate::landscape::Dataset;
use crate::{Error, ParamVector, Result};

/// Penalty kind for the regularization term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RegKind {
    L1,
    L2,
}

/// Weighting, robustness, regularization, and modulation knobs for the risk
/// stack.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RiskConfig {
    /// One positive weight per class.
    pub class_weights: Vec<f64>,
    /// Optional per-sample confidence in `[0, 1]`; `None` means all ones.
    #[serde(default)]
    pub rho: Option<Vec<f64>>,
    pub reg_kind: RegKind,
    /// Regularization strength, `>= 0`.
    pub reg_strength: f64,
    /// Modulation amplitude, `>= 0`. Zero disables modulation.
    pub kappa: f64,
    /// Modulation decay, `> 0`.
    pub delta: f64,
}

impl RiskConfig {
    /// Unit weights, no robustness discounts, no regularization, no
    /// modulation: collapses the stack to plain mean cross-entropy.
    pub fn neutral(classes: usize) -> Self {
        Self {
            class_weights: vec![1.0; classes],
            rho: None,
            reg_kind: RegKind::L2,
            reg_strength: 0.0,
            kappa: 0.0,
            delta: 1.0,
        }
    }

    pub fn validate_for(&self, data: &Dataset) -> Result<()> {
        check_class_weights(&self.class_weights, data)?;
        if let Some(rho) = &self.rho {
            check_rho(rho, data)?;
        }
        if self.reg_strength < 0.0 || !self.reg_strength.is_finite() {
            return Err(Error::Config(format!(
                "regularization strength must be >= 0 and finite, got {}",
                self.reg_strength
            )));
        }
        if self.kappa < 0.0 || !self.kappa.is_finite() {
            return Err(Error::Config(format!(
                "modulation amplitude must be >= 0 and finite, got {}",
                self.kappa
            )));
        }
        if self.delta <= 0.0 || !self.delta.is_finite() {
            return Err(Error::Config(format!(
                "modulation decay must be > 0 and finite, got {}",
                self.delta
            )));
        }
        Ok(())
    }
}

fn check_class_weights(weights: &[f64], data: &Dataset) -> Result<()> {
    if weights.len() != data.classes() {
        return Err(Error::Config(format!(
            "need one class weight per class: got {} weights for {} classes",
            weights.len(),
            data.classes()
        )));
    }
    for (c, w) in weights.iter().enumerate() {
        if *w <= 0.0 || !w.is_finite() {
            return Err(Error::Config(format!(
                "class weight for class {c} must be positive and finite, got {w}"
            )));
        }
    }
    Ok(())
}

fn check_rho(rho: &[f64], data: &Dataset) -> Result<()> {
    if rho.len() != data.len() {
        return Err(Error::Config(format!(
            "need one robustness factor per sample: got {} for {} samples",
            rho.len(),
            data.len()
        )));
    }
    for (i, r) in rho.iter().enumerate() {
        if !(*r >= 0.0 && *r <= 1.0) {
            return Err(Error::Config(format!(
                "robustness factor for sample {i} must lie in [0, 1], got {r}"
            )));
        }
    }
    Ok(())
}

/// `(1/N) sum_i w[y_i] * nll_i`.
pub fn class_weighted_risk(
    model: &dyn LogitModel,
    theta: &ParamVector,
    data: &Dataset,
    weights: &[f64],
) -> Result<f64> {
    robust_risk(model, theta, data, weights, None)
}

/// `(1/N) sum_i rho_i * w[y_i] * nll_i`; `rho = None` means all ones.
pub fn robust_risk(
    model: &dyn LogitModel,
    theta: &ParamVector,
    data: &Dataset,
    weights: &[f64],
    rho: Option<&[f64]>,
) -> Result<f64> {
    check_model_inputs(model, theta, data)?;
    check_class_weights(weights, data)?;
    if let Some(rho) = rho {
        check_rho(rho, data)?;
    }
    let mut buf = Vec::new();
    let mut total = 0.0;
    for i in 0..data.len() {
        let nll = sample_nll(model, theta.as_slice(), data.features(i), data.label(i), &mut buf)?;
        let r = rho.map_or(1.0, |r| r[i]);
        total += r * weights[data.label(i)] * nll;
    }
    Ok(total / data.len() as f64)
}

/// Penalty value and (sub)gradient: `strength * sum |theta_i|` for L1 with
/// subgradient 0 at 0, or `strength * 0.5 * |theta|^2` for L2.
pub fn regularizer(
    theta: &ParamVector,
    kind: RegKind,
    strength: f64,
) -> Result<(f64, ParamVector)> {
    if strength < 0.0 || !strength.is_finite() {
        return Err(Error::Config(format!(
            "regularization strength must be >= 0 and finite, got {strength}"
        )));
    }
    match kind {
        RegKind::L1 => {
            let value = strength * theta.iter().map(|v| v.abs()).sum::<f64>();
            let grad = theta
                .iter()
                .map(|v| {
                    if *v > 0.0 {
                        strength
                    } else if *v < 0.0 {
                        -strength
                    } else {
                        0.0
                    }
                })
                .collect();
            Ok((value, ParamVector::new_unchecked(grad)))
        }
        RegKind::L2 => Ok((0.5 * strength * theta.norm_sq(), theta.scaled(strength))),
    }
}

/// Robust risk plus the regularization penalty.
pub fn regularized_risk(
    model: &dyn LogitModel,
    theta: &ParamVector,
    data: &Dataset,
    config: &RiskConfig,
) -> Result<f64> {
    config.validate_for(data)?;
    let risk = robust_risk(model, theta, data, &config.class_weights, config.rho.as_deref())?;
    let (penalty, _) = regularizer(theta, config.reg_kind, config.reg_strength)?;
    Ok(risk + penalty)
}

/// Regularized risk together with its parameter gradient.
pub fn regularized_risk_grad(
    model: &dyn LogitModel,
    theta: &ParamVector,
    data: &Dataset,
    config: &RiskConfig,
) -> Result<(f64, ParamVector)> {
    config.validate_for(data)?;
    check_model_inputs(model, theta, data)?;
    let n = data.len() as f64;
    let mut grad = vec![0.0; model.param_dim()];
    let mut buf = Vec::new();
    let mut total = 0.0;
    for i in 0..data.len() {
        let r = config.rho.as_deref().map_or(1.0, |r| r[i]);
        let scale = r * config.class_weights[data.label(i)] / n;
        let nll = sample_nll_grad(
            model,
            theta.as_slice(),
            data.features(i),
            data.label(i),
            scale,
            &mut grad,
            &mut buf,
        )?;
        total += scale * nll;
    }
    let (penalty, penalty_grad) = regularizer(theta, config.reg_kind, config.reg_strength)?;
    let grad = ParamVector::new_unchecked(grad).add(&penalty_grad);
    Ok((total + penalty, grad))
}

/// Modulation factor `1 + kappa * exp(-delta * t)`; decays to one.
pub fn temporal_modulation(t: f64, kappa: f64, delta: f64) -> Result<f64> {
    if delta <= 0.0 || !delta.is_finite() {
        return Err(Error::Config(format!("modulation decay must be > 0, got {delta}")));
    }
    if kappa < 0.0 || !kappa.is_finite() {
        return Err(Error::Config(format!("modulation amplitude must be >= 0, got {kappa}")));
    }
    if t < 0.0 || !t.is_finite() {
        return Err(Error::Parameter(format!("epoch must be >= 0 and finite, got {t}")));
    }
    Ok(1.0 + kappa * (-delta * t).exp())
}

/// The modulated cost `gamma(t) * regularized_risk` with gradient scaled the
/// same way; positive scaling, so the minimizer does not depend on `t`.
pub fn dynamic_cost(
    model: &dyn LogitModel,
    theta: &ParamVector,
    data: &Dataset,
    t: f64,
    config: &RiskConfig,
) -> Result<(f64, ParamVector)> {
    let gamma = temporal_modulation(t, config.kappa, config.delta)?;
    let (value, grad) = regularized_risk_grad(model, theta, data, config)?;
    Ok((gamma * value, grad.scaled(gamma)))
}
