//! Probabilistic loss machinery: softmax likelihoods, cross-entropy, and
//! negative log-posterior objectives over classification models.
//!
//! Batch losses are means, not sums, so values are comparable across batch
//! sizes; the `1/m` factor is applied everywhere a batch is reduced.

mod risk;

pub use risk::{
    class_weighted_risk, dynamic_cost, regularized_risk, regularized_risk_grad, regularizer,
    robust_risk, temporal_modulation, RegKind, RiskConfig,
};

use crate::landscape::Dataset;
use crate::{Error, ParamVector, Result};

/// Maps parameters and features to per-class scores, and backpropagates a
/// score-space gradient into parameter space.
pub trait LogitModel: Send + Sync {
    fn param_dim(&self) -> usize;
    fn classes(&self) -> usize;
    /// Writes the per-class scores for one sample into `out`.
    fn logits(&self, theta: &[f64], features: &[f64], out: &mut [f64]) -> Result<()>;
    /// Accumulates `scale * d(loss)/d(theta)` into `grad`, where `dlogits` is
    /// `d(loss)/d(logits)` for this sample.
    fn backprop_logits(
        &self,
        theta: &[f64],
        features: &[f64],
        dlogits: &[f64],
        scale: f64,
        grad: &mut [f64],
    ) -> Result<()>;
}

/// Max-shifted softmax; entries land in `(0, 1]` and sum to one.
pub fn softmax(logits: &[f64]) -> Result<Vec<f64>> {
    if logits.is_empty() {
        return Err(Error::Dimension("softmax of an empty vector".into()));
    }
    if let Some(bad) = logits.iter().find(|v| !v.is_finite()) {
        return Err(Error::Input(format!("softmax input has non-finite entry {bad}")));
    }
    let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|z| (z - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    Ok(exps.into_iter().map(|e| e / sum).collect())
}

fn log_sum_exp(logits: &[f64]) -> f64 {
    let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    max + logits.iter().map(|z| (z - max).exp()).sum::<f64>().ln()
}

fn check_label(label: usize, classes: usize) -> Result<()> {
    if label >= classes {
        return Err(Error::Data(format!("label {label} out of range for {classes} classes")));
    }
    Ok(())
}

/// `-log softmax(logits)[label]`, computed through log-sum-exp.
pub fn cross_entropy_single(logits: &[f64], label: usize) -> Result<f64> {
    if logits.is_empty() {
        return Err(Error::Dimension("cross-entropy of an empty logit vector".into()));
    }
    check_label(label, logits.len())?;
    Ok(log_sum_exp(logits) - logits[label])
}

/// Mean cross-entropy over a batch of logit rows.
pub fn cross_entropy(logit_rows: &[Vec<f64>], labels: &[usize]) -> Result<f64> {
    if logit_rows.is_empty() {
        return Err(Error::Data("cross-entropy over an empty batch".into()));
    }
    if logit_rows.len() != labels.len() {
        return Err(Error::Data(format!(
            "batch has {} logit rows but {} labels",
            logit_rows.len(),
            labels.len()
        )));
    }
    let mut total = 0.0;
    for (row, &label) in logit_rows.iter().zip(labels) {
        total += cross_entropy_single(row, label)?;
    }
    Ok(total / logit_rows.len() as f64)
}

/// Cross-entropy gradient in logit space: `p - onehot(label)`. Sums to zero.
pub fn ce_grad_logits(probs: &[f64], label: usize) -> Result<Vec<f64>> {
    if probs.is_empty() {
        return Err(Error::Dimension("gradient of an empty probability vector".into()));
    }
    check_label(label, probs.len())?;
    let mut grad = probs.to_vec();
    grad[label] -= 1.0;
    Ok(grad)
}

/// Per-sample negative log-likelihood of `label` under the model.
pub(crate) fn sample_nll(
    model: &dyn LogitModel,
    theta: &[f64],
    features: &[f64],
    label: usize,
    logits_buf: &mut Vec<f64>,
) -> Result<f64> {
    check_label(label, model.classes())?;
    logits_buf.resize(model.classes(), 0.0);
    model.logits(theta, features, logits_buf)?;
    Ok(log_sum_exp(logits_buf) - logits_buf[label])
}

/// Per-sample NLL plus `scale * gradient` accumulated into `grad`.
pub(crate) fn sample_nll_grad(
    model: &dyn LogitModel,
    theta: &[f64],
    features: &[f64],
    label: usize,
    scale: f64,
    grad: &mut [f64],
    logits_buf: &mut Vec<f64>,
) -> Result<f64> {
    check_label(label, model.classes())?;
    logits_buf.resize(model.classes(), 0.0);
    model.logits(theta, features, logits_buf)?;
    let nll = log_sum_exp(logits_buf) - logits_buf[label];
    let mut dlogits = softmax(logits_buf)?;
    dlogits[label] -= 1.0;
    model.backprop_logits(theta, features, &dlogits, scale, grad)?;
    Ok(nll)
}

/// Mean cross-entropy of a model over a dataset.
pub fn model_loss(model: &dyn LogitModel, theta: &ParamVector, data: &Dataset) -> Result<f64> {
    check_model_inputs(model, theta, data)?;
    let mut buf = Vec::new();
    let mut total = 0.0;
    for i in 0..data.len() {
        total += sample_nll(model, theta.as_slice(), data.features(i), data.label(i), &mut buf)?;
    }
    Ok(total / data.len() as f64)
}

/// Mean cross-entropy and its parameter gradient.
pub fn model_loss_grad(
    model: &dyn LogitModel,
    theta: &ParamVector,
    data: &Dataset,
) -> Result<(f64, ParamVector)> {
    check_model_inputs(model, theta, data)?;
    let n = data.len() as f64;
    let mut grad = vec![0.0; model.param_dim()];
    let mut buf = Vec::new();
    let mut total = 0.0;
    for i in 0..data.len() {
        total += sample_nll_grad(
            model,
            theta.as_slice(),
            data.features(i),
            data.label(i),
            1.0 / n,
            &mut grad,
            &mut buf,
        )?;
    }
    Ok((total / n, ParamVector::new_unchecked(grad)))
}

pub(crate) fn check_model_inputs(
    model: &dyn LogitModel,
    theta: &ParamVector,
    data: &Dataset,
) -> Result<()> {
    if theta.dim() != model.param_dim() {
        return Err(Error::Dimension(format!(
            "parameter vector has dimension {}, model expects {}",
            theta.dim(),
            model.param_dim()
        )));
    }
    if data.classes() != model.classes() {
        return Err(Error::Data(format!(
            "dataset has {} classes, model expects {}",
            data.classes(),
            model.classes()
        )));
    }
    Ok(())
}

/// Prior over parameters for posterior objectives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PriorSpec {
    None,
    /// Isotropic Gaussian; contributes `precision / 2 * |theta|^2` with the
    /// additive normalization constant dropped.
    Gaussian {
        precision: f64,
    },
}

/// Negative log-posterior: mean NLL plus the prior penalty, constants dropped.
pub fn neg_log_posterior(
    model: &dyn LogitModel,
    theta: &ParamVector,
    data: &Dataset,
    prior: PriorSpec,
) -> Result<(f64, ParamVector)> {
    let (nll, grad) = model_loss_grad(model, theta, data)?;
    match prior {
        PriorSpec::None => Ok((nll, grad)),
        PriorSpec::Gaussian { precision } => {
            if precision < 0.0 || !precision.is_finite() {
                return Err(Error::Config(format!(
                    "gaussian prior precision must be >= 0 and finite, got {precision}"
                )));
            }
            let value = nll + 0.5 * precision * theta.norm_sq();
            let grad = grad.add_scaled(theta, precision);
            Ok((value, grad))
        }
    }
}
