//! Learning-rate schedules.

use serde::{Deserialize, Serialize};

use crate::{Error, ParamVector, Result};

/// Exponentially decaying learning rate `alpha0 * exp(-beta * t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpDecaySchedule {
    /// Initial rate, strictly positive.
    pub alpha0: f64,
    /// Decay constant, strictly positive.
    pub beta: f64,
}

impl Default for ExpDecaySchedule {
    fn default() -> Self {
        Self { alpha0: 0.1, beta: 0.01 }
    }
}

impl ExpDecaySchedule {
    pub fn new(alpha0: f64, beta: f64) -> Result<Self> {
        let s = Self { alpha0, beta };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.alpha0 <= 0.0 || !self.alpha0.is_finite() {
            return Err(Error::Parameter(format!(
                "initial rate must be positive and finite, got {}",
                self.alpha0
            )));
        }
        if self.beta <= 0.0 || !self.beta.is_finite() {
            return Err(Error::Parameter(format!(
                "decay constant must be positive and finite, got {}",
                self.beta
            )));
        }
        Ok(())
    }
}

/// One `(t, rate)` sample of a schedule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateSample {
    pub t: f64,
    pub rate: f64,
}

/// Rate at real-valued step `t >= 0`.
pub fn exp_decay(s: &ExpDecaySchedule, t: f64) -> Result<f64> {
    s.validate()?;
    if t < 0.0 || !t.is_finite() {
        return Err(Error::Parameter(format!("step must be >= 0 and finite, got {t}")));
    }
    Ok(s.alpha0 * (-s.beta * t).exp())
}

/// Time derivative of [`exp_decay`]; always negative.
pub fn exp_decay_derivative(s: &ExpDecaySchedule, t: f64) -> Result<f64> {
    Ok(-s.beta * exp_decay(s, t)?)
}

/// Gradient-norm-adaptive rate `1 / (1 + |g|)`, in `(0, 1]`.
pub fn grad_adaptive_rate(g: &ParamVector) -> Result<f64> {
    if !g.is_finite() {
        return Err(Error::Input("gradient has non-finite entries".into()));
    }
    Ok(1.0 / (1.0 + g.norm()))
}

/// Samples a schedule at integer steps `0..=t_max`.
pub fn exp_decay_ladder(s: &ExpDecaySchedule, t_max: usize) -> Result<Vec<RateSample>> {
    (0..=t_max)
        .map(|t| {
            let t = t as f64;
            Ok(RateSample { t, rate: exp_decay(s, t)? })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn decay_starts_at_initial_rate() {
        let s = ExpDecaySchedule::new(0.3, 0.7).unwrap();
        assert_eq!(exp_decay(&s, 0.0).unwrap(), 0.3);
    }

    #[test]
    fn decay_half_life() {
        let s = ExpDecaySchedule::new(0.1, std::f64::consts::LN_2).unwrap();
        let half = exp_decay(&s, 1.0).unwrap();
        assert!((half - 0.05).abs() < 1e-15, "got {half}");
    }

    #[test]
    fn negative_step_rejected() {
        let s = ExpDecaySchedule::default();
        assert!(exp_decay(&s, -0.5).is_err());
        assert!(exp_decay_derivative(&s, -0.5).is_err());
    }

    #[test]
    fn invalid_schedule_rejected() {
        assert!(ExpDecaySchedule::new(0.0, 1.0).is_err());
        assert!(ExpDecaySchedule::new(1.0, -2.0).is_err());
        assert!(ExpDecaySchedule::new(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn derivative_at_zero_and_ratio() {
        let s = ExpDecaySchedule::new(0.25, 0.05).unwrap();
        let d0 = exp_decay_derivative(&s, 0.0).unwrap();
        assert!((d0 + 0.25 * 0.05).abs() < 1e-15);
        for t in [0.0, 1.0, 10.0, 100.0] {
            let ratio = exp_decay_derivative(&s, t).unwrap() / exp_decay(&s, t).unwrap();
            assert!((ratio + s.beta).abs() <= 1e-12, "t={t}: ratio {ratio}");
        }
    }

    #[test]
    fn derivative_matches_central_difference() {
        let s = ExpDecaySchedule::new(0.5, 0.3).unwrap();
        let h = 1e-6;
        for t in [0.5, 2.0, 7.0, 31.0] {
            let fd = (exp_decay(&s, t + h).unwrap() - exp_decay(&s, t - h).unwrap()) / (2.0 * h);
            let an = exp_decay_derivative(&s, t).unwrap();
            assert!((fd - an).abs() / an.abs() < 1e-6, "t={t}: fd {fd} vs {an}");
        }
    }

    #[test]
    fn adaptive_rate_examples() {
        let zero = ParamVector::zeros(3);
        assert_eq!(grad_adaptive_rate(&zero).unwrap(), 1.0);
        let g3 = ParamVector::from_slice(&[0.0, 3.0]).unwrap();
        assert_eq!(grad_adaptive_rate(&g3).unwrap(), 0.25);
        let g1 = ParamVector::from_slice(&[1.0]).unwrap();
        assert_eq!(grad_adaptive_rate(&g1).unwrap(), 0.5);
        let bad = ParamVector::new_unchecked(vec![f64::NAN]);
        assert!(grad_adaptive_rate(&bad).is_err());
    }

    #[test]
    fn ladder_is_positive_and_decreasing() {
        let s = ExpDecaySchedule::new(0.5, 0.01).unwrap();
        let ladder = exp_decay_ladder(&s, 200).unwrap();
        assert_eq!(ladder.len(), 201);
        for pair in ladder.windows(2) {
            assert!(pair[0].rate > 0.0);
            assert!(pair[1].rate < pair[0].rate);
        }
    }

    proptest! {
        // alpha(t1 + t2) = alpha(t1) * alpha(t2) / alpha0
        #[test]
        fn exponential_law(t1 in 0.0..40.0f64, t2 in 0.0..40.0f64) {
            let s = ExpDecaySchedule::new(0.2, 0.03).unwrap();
            let lhs = exp_decay(&s, t1 + t2).unwrap();
            let rhs = exp_decay(&s, t1).unwrap() * exp_decay(&s, t2).unwrap() / s.alpha0;
            prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs.max(rhs));
        }

        // rate * (1 + |g|) = 1
        #[test]
        fn adaptive_rate_identity(values in proptest::collection::vec(-1e3..1e3f64, 1..6)) {
            let g = ParamVector::new(values).unwrap();
            let rate = grad_adaptive_rate(&g).unwrap();
            prop_assert!(rate > 0.0 && rate <= 1.0);
            prop_assert!((rate * (1.0 + g.norm()) - 1.0).abs() <= 1e-12);
        }
    }
}
