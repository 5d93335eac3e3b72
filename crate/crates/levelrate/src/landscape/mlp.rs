//! One-hidden-layer ReLU classifier with hand-derived backpropagation.
//!
//! Parameters flatten into a single vector with a fixed layout so trajectories
//! are comparable across runs: row-major `w1` (hidden x input), then `b1`,
//! then row-major `w2` (classes x hidden), then `b2`. The ReLU subgradient at
//! exactly zero is zero.

use super::{check_point, Dataset, DomainBox, Objective};
use crate::loss::{
    model_loss_grad, regularized_risk, regularized_risk_grad, temporal_modulation, LogitModel,
    RiskConfig,
};
use crate::{Error, ParamVector, Result};

/// Architecture of the classifier; doubles as the [`LogitModel`] implementation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MlpSpec {
    pub input_dim: usize,
    pub hidden_dim: usize,
    pub classes: usize,
}

/// Unflattened parameter blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpParams {
    /// hidden x input, row-major.
    pub w1: Vec<f64>,
    pub b1: Vec<f64>,
    /// classes x hidden, row-major.
    pub w2: Vec<f64>,
    pub b2: Vec<f64>,
}

impl MlpSpec {
    pub fn new(input_dim: usize, hidden_dim: usize, classes: usize) -> Result<Self> {
        if input_dim == 0 || hidden_dim == 0 {
            return Err(Error::Dimension("mlp input and hidden dimensions must be >= 1".into()));
        }
        if classes < 2 {
            return Err(Error::Dimension(format!("mlp needs at least 2 classes, got {classes}")));
        }
        Ok(Self { input_dim, hidden_dim, classes })
    }

    pub fn param_dim(&self) -> usize {
        self.hidden_dim * self.input_dim
            + self.hidden_dim
            + self.classes * self.hidden_dim
            + self.classes
    }

    fn b1_offset(&self) -> usize {
        self.hidden_dim * self.input_dim
    }

    fn w2_offset(&self) -> usize {
        self.b1_offset() + self.hidden_dim
    }

    fn b2_offset(&self) -> usize {
        self.w2_offset() + self.classes * self.hidden_dim
    }

    pub fn flatten(&self, p: &MlpParams) -> Result<ParamVector> {
        if p.w1.len() != self.hidden_dim * self.input_dim
            || p.b1.len() != self.hidden_dim
            || p.w2.len() != self.classes * self.hidden_dim
            || p.b2.len() != self.classes
        {
            return Err(Error::Dimension(
                "mlp parameter blocks do not match the architecture".into(),
            ));
        }
        let mut theta = Vec::with_capacity(self.param_dim());
        theta.extend_from_slice(&p.w1);
        theta.extend_from_slice(&p.b1);
        theta.extend_from_slice(&p.w2);
        theta.extend_from_slice(&p.b2);
        ParamVector::new(theta)
    }

    pub fn unflatten(&self, theta: &ParamVector) -> Result<MlpParams> {
        if theta.dim() != self.param_dim() {
            return Err(Error::Dimension(format!(
                "parameter vector has dimension {}, spec expects {}",
                theta.dim(),
                self.param_dim()
            )));
        }
        let t = theta.as_slice();
        Ok(MlpParams {
            w1: t[..self.b1_offset()].to_vec(),
            b1: t[self.b1_offset()..self.w2_offset()].to_vec(),
            w2: t[self.w2_offset()..self.b2_offset()].to_vec(),
            b2: t[self.b2_offset()..].to_vec(),
        })
    }

    fn forward_hidden(&self, theta: &[f64], x: &[f64], pre: &mut [f64], act: &mut [f64]) {
        let b1 = self.b1_offset();
        for j in 0..self.hidden_dim {
            let mut z = theta[b1 + j];
            let row = j * self.input_dim;
            for k in 0..self.input_dim {
                z += theta[row + k] * x[k];
            }
            pre[j] = z;
            act[j] = if z > 0.0 { z } else { 0.0 };
        }
    }
}

impl LogitModel for MlpSpec {
    fn param_dim(&self) -> usize {
        MlpSpec::param_dim(self)
    }

    fn classes(&self) -> usize {
        self.classes
    }

    fn logits(&self, theta: &[f64], features: &[f64], out: &mut [f64]) -> Result<()> {
        self.check_shapes(theta, features, out.len())?;
        let mut pre = vec![0.0; self.hidden_dim];
        let mut act = vec![0.0; self.hidden_dim];
        self.forward_hidden(theta, features, &mut pre, &mut act);
        let w2 = self.w2_offset();
        let b2 = self.b2_offset();
        for c in 0..self.classes {
            let mut z = theta[b2 + c];
            let row = w2 + c * self.hidden_dim;
            for j in 0..self.hidden_dim {
                z += theta[row + j] * act[j];
            }
            out[c] = z;
        }
        Ok(())
    }

    fn backprop_logits(
        &self,
        theta: &[f64],
        features: &[f64],
        dlogits: &[f64],
        scale: f64,
        grad: &mut [f64],
    ) -> Result<()> {
        self.check_shapes(theta, features, dlogits.len())?;
        if grad.len() != self.param_dim() {
            return Err(Error::Dimension("gradient buffer does not match parameter count".into()));
        }
        let mut pre = vec![0.0; self.hidden_dim];
        let mut act = vec![0.0; self.hidden_dim];
        self.forward_hidden(theta, features, &mut pre, &mut act);

        let w2 = self.w2_offset();
        let b2 = self.b2_offset();
        let b1 = self.b1_offset();

        let mut dact = vec![0.0; self.hidden_dim];
        for c in 0..self.classes {
            let d = dlogits[c];
            let row = w2 + c * self.hidden_dim;
            for j in 0..self.hidden_dim {
                grad[row + j] += scale * d * act[j];
                dact[j] += theta[row + j] * d;
            }
            grad[b2 + c] += scale * d;
        }
        for j in 0..self.hidden_dim {
            // ReLU gate: closed at exactly zero
            if pre[j] > 0.0 {
                let d = dact[j];
                let row = j * self.input_dim;
                for k in 0..self.input_dim {
                    grad[row + k] += scale * d * features[k];
                }
                grad[b1 + j] += scale * d;
            }
        }
        Ok(())
    }
}

impl MlpSpec {
    fn check_shapes(&self, theta: &[f64], features: &[f64], logit_len: usize) -> Result<()> {
        if theta.len() != self.param_dim() {
            return Err(Error::Dimension(format!(
                "parameter vector has dimension {}, spec expects {}",
                theta.len(),
                self.param_dim()
            )));
        }
        if features.len() != self.input_dim {
            return Err(Error::Dimension(format!(
                "feature row has {} entries, spec expects {}",
                features.len(),
                self.input_dim
            )));
        }
        if logit_len != self.classes {
            return Err(Error::Dimension("logit buffer does not match class count".into()));
        }
        Ok(())
    }
}

/// Mean cross-entropy of the classifier over a batch, with the
/// backpropagated parameter gradient.
pub fn mlp_loss_and_grad(
    spec: &MlpSpec,
    theta: &ParamVector,
    data: &Dataset,
) -> Result<(f64, ParamVector)> {
    model_loss_grad(spec, theta, data)
}

/// The classifier's risk as a standalone objective: regularized risk by
/// default, scaled by the modulation factor when a fixed epoch is attached.
pub struct MlpObjective {
    spec: MlpSpec,
    data: Dataset,
    risk: RiskConfig,
    modulation_t: Option<f64>,
    domain: DomainBox,
    name: String,
}

impl MlpObjective {
    pub fn new(spec: MlpSpec, data: Dataset, risk: RiskConfig) -> Result<Self> {
        if data.num_features() != spec.input_dim {
            return Err(Error::Dimension(format!(
                "dataset has {} features, mlp expects {}",
                data.num_features(),
                spec.input_dim
            )));
        }
        if data.classes() != spec.classes {
            return Err(Error::Data(format!(
                "dataset has {} classes, mlp expects {}",
                data.classes(),
                spec.classes
            )));
        }
        risk.validate_for(&data)?;
        let domain = DomainBox::symmetric(spec.param_dim(), 6.0)?;
        Ok(Self { spec, data, risk, modulation_t: None, domain, name: "mlp-risk".into() })
    }

    /// Evaluates the cost at a frozen modulation epoch `t`.
    pub fn with_modulation_time(mut self, t: f64) -> Result<Self> {
        // surfaces bad (t, kappa, delta) combinations at construction
        temporal_modulation(t, self.risk.kappa, self.risk.delta)?;
        self.modulation_t = Some(t);
        self.name = format!("mlp-risk@t={t}");
        Ok(self)
    }

    pub fn spec(&self) -> &MlpSpec {
        &self.spec
    }

    pub fn data(&self) -> &Dataset {
        &self.data
    }

    pub fn risk(&self) -> &RiskConfig {
        &self.risk
    }

    fn gamma(&self) -> Result<f64> {
        match self.modulation_t {
            Some(t) => temporal_modulation(t, self.risk.kappa, self.risk.delta),
            None => Ok(1.0),
        }
    }
}

impl Objective for MlpObjective {
    fn name(&self) -> &str {
        &self.name
    }

    fn dim(&self) -> usize {
        self.spec.param_dim()
    }

    fn domain(&self) -> &DomainBox {
        &self.domain
    }

    fn eval(&self, theta: &ParamVector) -> Result<f64> {
        check_point(&self.name, self.dim(), theta)?;
        Ok(self.gamma()? * regularized_risk(&self.spec, theta, &self.data, &self.risk)?)
    }

    fn grad(&self, theta: &ParamVector) -> Result<ParamVector> {
        check_point(&self.name, self.dim(), theta)?;
        let (_, grad) = regularized_risk_grad(&self.spec, theta, &self.data, &self.risk)?;
        Ok(grad.scaled(self.gamma()?))
    }
}
