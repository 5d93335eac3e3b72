//! Learning-rate tuner that wraps a base first-order method.
//!
//! The tuner accumulates the base algorithm's raw updates into a displacement
//! `delta` anchored at a frozen reference point, and learns a non-negative
//! scale for that displacement from the alignment between `delta` and fresh
//! gradients. Six decay factors run in parallel; the emitted step scale is the
//! sum of their per-factor scales, so the iterate is
//! `x_ref + (sum s_i) * delta`.

use serde::{Deserialize, Serialize};

use crate::{Error, ParamVector, Result};

/// Number of decay factors tracked in parallel.
pub const TUNER_BETA_COUNT: usize = 6;

/// Tuner hyperparameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TunerConfig {
    /// Per-slot decay factors in `[0, 1]`.
    pub betas: [f64; TUNER_BETA_COUNT],
    /// Decay pressure on the learned scale.
    pub lambda: f64,
    /// Seed magnitude for the scale bootstrap.
    pub s_init: f64,
    /// Division and norm guard.
    pub epsilon: f64,
}

impl Default for TunerConfig {
    fn default() -> Self {
        Self {
            betas: [0.9, 0.99, 0.999, 0.9999, 0.99999, 0.999999],
            lambda: 0.01,
            s_init: 1e-8,
            epsilon: 1e-8,
        }
    }
}

impl TunerConfig {
    pub fn validate(&self) -> Result<()> {
        for (i, b) in self.betas.iter().enumerate() {
            if !(*b >= 0.0 && *b <= 1.0) {
                return Err(Error::Config(format!(
                    "tuner decay factor {i} must lie in [0, 1], got {b}"
                )));
            }
        }
        if self.s_init <= 0.0 || !self.s_init.is_finite() {
            return Err(Error::Config(format!("tuner s_init must be > 0, got {}", self.s_init)));
        }
        if self.epsilon <= 0.0 || !self.epsilon.is_finite() {
            return Err(Error::Config(format!("tuner epsilon must be > 0, got {}", self.epsilon)));
        }
        if !self.lambda.is_finite() {
            return Err(Error::Config(format!("tuner lambda must be finite, got {}", self.lambda)));
        }
        Ok(())
    }
}

/// Tuner state; all moment slots stay componentwise non-negative.
#[derive(Debug, Clone, PartialEq)]
pub struct TunerState {
    delta: ParamVector,
    x_ref: ParamVector,
    m: [f64; TUNER_BETA_COUNT],
    v: [f64; TUNER_BETA_COUNT],
    r: [f64; TUNER_BETA_COUNT],
    s: [f64; TUNER_BETA_COUNT],
    t: usize,
}

impl TunerState {
    pub fn delta(&self) -> &ParamVector {
        &self.delta
    }

    pub fn x_ref(&self) -> &ParamVector {
        &self.x_ref
    }

    pub fn m(&self) -> &[f64; TUNER_BETA_COUNT] {
        &self.m
    }

    pub fn v(&self) -> &[f64; TUNER_BETA_COUNT] {
        &self.v
    }

    pub fn r(&self) -> &[f64; TUNER_BETA_COUNT] {
        &self.r
    }

    pub fn s(&self) -> &[f64; TUNER_BETA_COUNT] {
        &self.s
    }

    pub fn step_count(&self) -> usize {
        self.t
    }

    /// The emitted step scale `sum_i s_i`.
    pub fn step_scale(&self) -> f64 {
        self.s.iter().sum()
    }

    /// The iterate this state currently emits: `x_ref + step_scale * delta`.
    pub fn current_iterate(&self) -> ParamVector {
        self.x_ref.add_scaled(&self.delta, self.step_scale())
    }
}

/// Fresh state anchored at `x0`: zero displacement, zero moments, so the
/// first emitted iterate is `x0` itself.
pub fn tuner_init(x0: &ParamVector, config: &TunerConfig) -> Result<TunerState> {
    config.validate()?;
    if !x0.is_finite() {
        return Err(Error::Input("tuner reference point must be finite".into()));
    }
    Ok(TunerState {
        delta: ParamVector::zeros(x0.dim()),
        x_ref: x0.clone(),
        m: [0.0; TUNER_BETA_COUNT],
        v: [0.0; TUNER_BETA_COUNT],
        r: [0.0; TUNER_BETA_COUNT],
        s: [0.0; TUNER_BETA_COUNT],
        t: 0,
    })
}

/// One tuner step: fold the base update `u` into the displacement, refresh
/// the per-factor moments from the alignment score, and emit the next
/// iterate.
///
/// `g` is the gradient at the currently emitted iterate.
pub fn tuner_step(
    state: &mut TunerState,
    config: &TunerConfig,
    g: &ParamVector,
    u: &ParamVector,
) -> Result<ParamVector> {
    if g.dim() != state.delta.dim() || u.dim() != state.delta.dim() {
        return Err(Error::Dimension(format!(
            "tuner step needs gradient and update of dimension {}, got {} and {}",
            state.delta.dim(),
            g.dim(),
            u.dim()
        )));
    }

    let x_t = state.current_iterate();
    let g_norm = g.norm();
    let anchor = x_t.norm().max(config.epsilon);
    let align = state.delta.dot(g);
    let h = align + config.lambda * (g_norm / anchor);
    if !h.is_finite() {
        return Err(Error::Numerical(format!(
            "tuner alignment score is not finite at step {}: <delta,g> = {align}, |g| = {g_norm}, |x| = {anchor}",
            state.t + 1
        )));
    }

    state.delta = state.delta.add(u);
    let n = TUNER_BETA_COUNT as f64;
    for i in 0..TUNER_BETA_COUNT {
        let b = config.betas[i];
        state.m[i] = (b * state.m[i]).max(h);
        state.v[i] = b * b * state.v[i] + h * h;
        state.r[i] = (b * state.r[i] - state.s[i] * h).max(0.0);
        let w = config.s_init * state.m[i] / n + state.r[i];
        state.s[i] = w / (state.v[i].sqrt() + config.epsilon);
    }
    state.t += 1;
    Ok(state.current_iterate())
}
