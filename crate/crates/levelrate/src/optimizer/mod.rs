//! Gradient-descent drivers and trajectory recording.

mod tuner;

pub use tuner::{tuner_init, tuner_step, TunerConfig, TunerState, TUNER_BETA_COUNT};

use crate::landscape::Objective;
use crate::schedule::{exp_decay, grad_adaptive_rate, ExpDecaySchedule};
use crate::{Error, ParamVector, Result};

/// Plain descent step `x - alpha * g`.
pub fn gd_step(x: &ParamVector, g: &ParamVector, alpha: f64) -> Result<ParamVector> {
    if x.dim() != g.dim() {
        return Err(Error::Dimension(format!(
            "point has dimension {}, gradient has {}",
            x.dim(),
            g.dim()
        )));
    }
    if alpha <= 0.0 || !alpha.is_finite() {
        return Err(Error::Parameter(format!(
            "step size must be positive and finite, got {alpha}"
        )));
    }
    Ok(x.add_scaled(g, -alpha))
}

/// Descent step with the gradient-norm-adaptive rate `1 / (1 + |g|)`.
pub fn adaptive_gd_step(x: &ParamVector, obj: &dyn Objective) -> Result<ParamVector> {
    let g = obj.grad(x)?;
    let rate = grad_adaptive_rate(&g)?;
    gd_step(x, &g, rate)
}

/// How steps are sized during a run.
#[derive(Debug, Clone)]
pub enum Method {
    Fixed {
        alpha: f64,
    },
    ExpDecay(ExpDecaySchedule),
    Adaptive,
    /// Tuner wrapping SGD on the given schedule as its base algorithm.
    Tuner {
        config: TunerConfig,
        base: ExpDecaySchedule,
    },
}

/// The wrapped first-order method the tuner rescales: gradient in, update out.
pub trait BaseUpdate {
    fn update(&mut self, t: usize, g: &ParamVector) -> Result<ParamVector>;
}

/// SGD on an exponential-decay schedule; update `-alpha(t) * g`.
pub struct SgdBase {
    pub schedule: ExpDecaySchedule,
}

impl BaseUpdate for SgdBase {
    fn update(&mut self, t: usize, g: &ParamVector) -> Result<ParamVector> {
        let alpha = exp_decay(&self.schedule, t as f64)?;
        Ok(g.scaled(-alpha))
    }
}

/// Run-level options.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub steps: usize,
    /// Keep a copy of every iterate in the trajectory.
    pub store_snapshots: bool,
    /// Loss above this aborts the run as diverged.
    pub divergence_loss: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self { steps: 100, store_snapshots: false, divergence_loss: 1e12 }
    }
}

/// Outcome of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunStatus {
    Completed,
    /// The iterate or loss left the finite, bounded regime at this step; the
    /// records up to the previous step are preserved.
    Diverged {
        at_step: usize,
    },
}

/// One recorded step. `rate` is the step scale used to leave this point; the
/// final record carries the scale the next step would have used.
#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    pub t: usize,
    pub loss: f64,
    pub grad_norm: f64,
    pub rate: f64,
    pub lyapunov_rate: f64,
    pub x: Option<ParamVector>,
}

/// Per-step records of a training run, `t` strictly increasing from zero.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub records: Vec<StepRecord>,
    pub status: RunStatus,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn is_completed(&self) -> bool {
        self.status == RunStatus::Completed
    }

    pub fn initial_loss(&self) -> Option<f64> {
        self.records.first().map(|r| r.loss)
    }

    pub fn final_loss(&self) -> Option<f64> {
        self.records.last().map(|r| r.loss)
    }
}

trait Stepper {
    /// Advance from `x` with gradient `g`; returns the next iterate and the
    /// step scale that produced it.
    fn step(&mut self, t: usize, x: &ParamVector, g: &ParamVector) -> Result<(ParamVector, f64)>;
    /// Scale reported on a record that is not followed by a step.
    fn resting_rate(&self, t: usize, g: &ParamVector) -> Result<f64>;
}

struct FixedStepper {
    alpha: f64,
}

impl Stepper for FixedStepper {
    fn step(&mut self, _t: usize, x: &ParamVector, g: &ParamVector) -> Result<(ParamVector, f64)> {
        Ok((gd_step(x, g, self.alpha)?, self.alpha))
    }

    fn resting_rate(&self, _t: usize, _g: &ParamVector) -> Result<f64> {
        Ok(self.alpha)
    }
}

struct ExpDecayStepper {
    schedule: ExpDecaySchedule,
}

impl Stepper for ExpDecayStepper {
    fn step(&mut self, t: usize, x: &ParamVector, g: &ParamVector) -> Result<(ParamVector, f64)> {
        let alpha = exp_decay(&self.schedule, t as f64)?;
        Ok((gd_step(x, g, alpha)?, alpha))
    }

    fn resting_rate(&self, t: usize, _g: &ParamVector) -> Result<f64> {
        exp_decay(&self.schedule, t as f64)
    }
}

struct AdaptiveStepper;

impl Stepper for AdaptiveStepper {
    fn step(&mut self, _t: usize, x: &ParamVector, g: &ParamVector) -> Result<(ParamVector, f64)> {
        let rate = grad_adaptive_rate(g)?;
        Ok((gd_step(x, g, rate)?, rate))
    }

    fn resting_rate(&self, _t: usize, g: &ParamVector) -> Result<f64> {
        grad_adaptive_rate(g)
    }
}

struct TunerStepper<'a> {
    state: TunerState,
    config: TunerConfig,
    base: &'a mut dyn BaseUpdate,
}

impl Stepper for TunerStepper<'_> {
    fn step(&mut self, t: usize, _x: &ParamVector, g: &ParamVector) -> Result<(ParamVector, f64)> {
        let u = self.base.update(t, g)?;
        let next = tuner_step(&mut self.state, &self.config, g, &u)?;
        Ok((next, self.state.step_scale()))
    }

    fn resting_rate(&self, _t: usize, _g: &ParamVector) -> Result<f64> {
        Ok(self.state.step_scale())
    }
}

/// Runs `steps` descent steps of `method` from `x0`, recording every iterate
/// (`steps + 1` records on completion). Divergence aborts the run with the
/// partial trajectory preserved.
pub fn run_training(
    obj: &dyn Objective,
    method: &Method,
    x0: &ParamVector,
    run: &RunConfig,
) -> Result<Trajectory> {
    match method {
        Method::Fixed { alpha } => {
            if *alpha <= 0.0 || !alpha.is_finite() {
                return Err(Error::Parameter(format!(
                    "fixed step size must be positive and finite, got {alpha}"
                )));
            }
            run_loop(obj, x0, run, &mut FixedStepper { alpha: *alpha })
        }
        Method::ExpDecay(schedule) => {
            schedule.validate()?;
            run_loop(obj, x0, run, &mut ExpDecayStepper { schedule: *schedule })
        }
        Method::Adaptive => run_loop(obj, x0, run, &mut AdaptiveStepper),
        Method::Tuner { config, base } => {
            base.validate()?;
            let mut sgd = SgdBase { schedule: *base };
            run_tuner_training(obj, x0, config, &mut sgd, run)
        }
    }
}

/// Tuner run with an injectable base algorithm.
pub fn run_tuner_training(
    obj: &dyn Objective,
    x0: &ParamVector,
    config: &TunerConfig,
    base: &mut dyn BaseUpdate,
    run: &RunConfig,
) -> Result<Trajectory> {
    let state = tuner_init(x0, config)?;
    let mut stepper = TunerStepper { state, config: config.clone(), base };
    run_loop(obj, x0, run, &mut stepper)
}

fn run_loop(
    obj: &dyn Objective,
    x0: &ParamVector,
    run: &RunConfig,
    stepper: &mut dyn Stepper,
) -> Result<Trajectory> {
    if run.steps == 0 {
        return Err(Error::Input("a run needs at least one step".into()));
    }
    if x0.dim() != obj.dim() {
        return Err(Error::Dimension(format!(
            "start point has dimension {}, objective expects {}",
            x0.dim(),
            obj.dim()
        )));
    }
    if !x0.is_finite() {
        return Err(Error::Input("start point must be finite".into()));
    }

    let mut records = Vec::with_capacity(run.steps + 1);
    let mut x = x0.clone();
    for t in 0..=run.steps {
        if !x.is_finite() {
            return Ok(Trajectory { records, status: RunStatus::Diverged { at_step: t } });
        }
        let loss = obj.eval(&x)?;
        if !loss.is_finite() || loss > run.divergence_loss {
            return Ok(Trajectory { records, status: RunStatus::Diverged { at_step: t } });
        }
        let g = obj.grad(&x)?;
        let grad_norm = g.norm();

        let (next, rate) = if t < run.steps {
            let (next, rate) = stepper.step(t, &x, &g)?;
            (Some(next), rate)
        } else {
            (None, stepper.resting_rate(t, &g)?)
        };

        records.push(StepRecord {
            t,
            loss,
            grad_norm,
            rate,
            lyapunov_rate: -rate * g.norm_sq(),
            x: run.store_snapshots.then(|| x.clone()),
        });

        if let Some(next) = next {
            x = next;
        }
    }
    Ok(Trajectory { records, status: RunStatus::Completed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::landscape::{Quadratic, Rosenbrock};
    use proptest::prelude::*;

    #[test]
    fn gd_step_examples() {
        let x = ParamVector::from_slice(&[1.0, 1.0]).unwrap();
        let zero = ParamVector::zeros(2);
        assert_eq!(gd_step(&x, &zero, 0.5).unwrap(), x);

        let g = ParamVector::from_slice(&[1.0, 1.0]).unwrap();
        assert_eq!(gd_step(&x, &g, 1.0).unwrap(), zero);

        assert!(gd_step(&x, &ParamVector::zeros(3), 0.1).is_err());
        assert!(gd_step(&x, &g, 0.0).is_err());
        assert!(gd_step(&x, &g, -0.1).is_err());
    }

    #[test]
    fn gd_contracts_the_quadratic() {
        // x <- (1 - alpha) x, so 100 steps at alpha = 0.1 leave 10 * 0.9^100
        let q = Quadratic::new(1).unwrap();
        let mut x = ParamVector::from_slice(&[10.0]).unwrap();
        for _ in 0..100 {
            let g = q.grad(&x).unwrap();
            x = gd_step(&x, &g, 0.1).unwrap();
        }
        let expected = 10.0 * 0.9f64.powi(100);
        assert!((x[0] - expected).abs() < 1e-9, "{} vs {expected}", x[0]);
    }

    #[test]
    fn adaptive_step_examples() {
        let q = Quadratic::new(2).unwrap();
        let origin = ParamVector::zeros(2);
        assert_eq!(adaptive_gd_step(&origin, &q).unwrap(), origin);

        // |g| = 5, so the step is x - x/6 = (5/6) x
        let x = ParamVector::from_slice(&[3.0, 4.0]).unwrap();
        let next = adaptive_gd_step(&x, &q).unwrap();
        for i in 0..2 {
            assert!((next[i] - x[i] * 5.0 / 6.0).abs() < 1e-15);
        }

        // repeated steps strictly shrink the norm until the iterate
        // underflows to the exact critical point
        let mut x = ParamVector::from_slice(&[4.0, -2.5]).unwrap();
        let mut norm = x.norm();
        for _ in 0..50 {
            x = adaptive_gd_step(&x, &q).unwrap();
            let next_norm = x.norm();
            if norm == 0.0 {
                assert_eq!(next_norm, 0.0);
            } else {
                assert!(next_norm < norm);
            }
            norm = next_norm;
        }
    }

    #[test]
    fn run_rejects_zero_steps_and_counts_records() {
        let q = Quadratic::new(2).unwrap();
        let x0 = ParamVector::from_slice(&[1.0, 1.0]).unwrap();
        let bad = RunConfig { steps: 0, ..RunConfig::default() };
        assert!(run_training(&q, &Method::Adaptive, &x0, &bad).is_err());

        let one = RunConfig { steps: 1, ..RunConfig::default() };
        let traj = run_training(&q, &Method::Adaptive, &x0, &one).unwrap();
        assert_eq!(traj.len(), 2);
        assert!(traj.is_completed());
        assert_eq!(traj.records[0].t, 0);
        assert_eq!(traj.records[1].t, 1);
    }

    #[test]
    fn exp_decay_run_descends_on_the_quadratic() {
        let q = Quadratic::new(2).unwrap();
        let x0 = ParamVector::from_slice(&[5.0, -4.0]).unwrap();
        let method = Method::ExpDecay(ExpDecaySchedule::new(0.5, 0.01).unwrap());
        let run = RunConfig { steps: 200, ..RunConfig::default() };
        let traj = run_training(&q, &method, &x0, &run).unwrap();
        assert!(traj.is_completed());
        assert_eq!(traj.len(), 201);
        assert!(traj.final_loss().unwrap() < traj.initial_loss().unwrap());
    }

    #[test]
    fn identical_runs_are_bit_identical() {
        let q = Quadratic::new(2).unwrap();
        let x0 = ParamVector::from_slice(&[3.0, 2.0]).unwrap();
        let method =
            Method::Tuner { config: TunerConfig::default(), base: ExpDecaySchedule::default() };
        let run = RunConfig { steps: 50, ..RunConfig::default() };
        let a = run_training(&q, &method, &x0, &run).unwrap();
        let b = run_training(&q, &method, &x0, &run).unwrap();
        assert_eq!(a.len(), b.len());
        for (ra, rb) in a.records.iter().zip(&b.records) {
            assert_eq!(ra.loss.to_bits(), rb.loss.to_bits());
            assert_eq!(ra.rate.to_bits(), rb.rate.to_bits());
            assert_eq!(ra.lyapunov_rate.to_bits(), rb.lyapunov_rate.to_bits());
        }
    }

    #[test]
    fn oversized_rate_diverges_with_partial_trajectory() {
        let r = Rosenbrock::new();
        let x0 = ParamVector::from_slice(&[-1.0, 1.0]).unwrap();
        let method = Method::Fixed { alpha: 10.0 };
        let run = RunConfig { steps: 100, ..RunConfig::default() };
        let traj = run_training(&r, &method, &x0, &run).unwrap();
        match traj.status {
            RunStatus::Diverged { at_step } => {
                assert!(at_step > 0);
                assert!(!traj.is_empty());
                assert!(traj.len() <= at_step);
                for rec in &traj.records {
                    assert!(rec.loss.is_finite());
                }
            }
            RunStatus::Completed => panic!("expected divergence"),
        }
    }

    #[test]
    fn tuner_accepts_any_base_update() {
        // a heavy-ball style base, exercising the injectable interface
        struct MomentumBase {
            velocity: Option<ParamVector>,
        }
        impl BaseUpdate for MomentumBase {
            fn update(&mut self, _t: usize, g: &ParamVector) -> Result<ParamVector> {
                let v = match &self.velocity {
                    Some(v) => v.scaled(0.9).add_scaled(g, -0.05),
                    None => g.scaled(-0.05),
                };
                self.velocity = Some(v.clone());
                Ok(v)
            }
        }

        let q = Quadratic::new(2).unwrap();
        let x0 = ParamVector::from_slice(&[5.0, 5.0]).unwrap();
        let mut base = MomentumBase { velocity: None };
        let run = RunConfig { steps: 2000, ..RunConfig::default() };
        let traj = run_tuner_training(&q, &x0, &TunerConfig::default(), &mut base, &run).unwrap();
        assert!(traj.is_completed());
        assert!(traj.final_loss().unwrap() < traj.initial_loss().unwrap());
    }

    #[test]
    fn run_rejects_mismatched_start_point() {
        let q = Quadratic::new(2).unwrap();
        let x0 = ParamVector::from_slice(&[1.0, 2.0, 3.0]).unwrap();
        let run = RunConfig { steps: 5, ..RunConfig::default() };
        assert!(run_training(&q, &Method::Adaptive, &x0, &run).is_err());
    }

    #[test]
    fn lyapunov_column_pairs_rate_with_gradient() {
        let q = Quadratic::new(2).unwrap();
        let x0 = ParamVector::from_slice(&[2.0, 1.0]).unwrap();
        let run = RunConfig { steps: 5, ..RunConfig::default() };
        let traj = run_training(&q, &Method::Fixed { alpha: 0.2 }, &x0, &run).unwrap();
        for rec in &traj.records {
            let expected = -rec.rate * rec.grad_norm * rec.grad_norm;
            assert!((rec.lyapunov_rate - expected).abs() < 1e-12);
            assert!(rec.lyapunov_rate <= 0.0);
        }
    }

    #[test]
    fn snapshots_follow_the_flag() {
        let q = Quadratic::new(2).unwrap();
        let x0 = ParamVector::from_slice(&[1.0, 1.0]).unwrap();
        let with = RunConfig { steps: 3, store_snapshots: true, ..RunConfig::default() };
        let traj = run_training(&q, &Method::Adaptive, &x0, &with).unwrap();
        assert!(traj.records.iter().all(|r| r.x.is_some()));
        assert_eq!(traj.records[0].x.as_ref().unwrap(), &x0);

        let without = RunConfig { steps: 3, ..RunConfig::default() };
        let traj = run_training(&q, &Method::Adaptive, &x0, &without).unwrap();
        assert!(traj.records.iter().all(|r| r.x.is_none()));
    }

    proptest! {
        // stepping with g1 then g2 lands where a single step with g1 + g2 does
        #[test]
        fn gd_step_splits_over_gradients(
            x in proptest::collection::vec(-10.0..10.0f64, 2..5),
            seed in 0u64..1000,
        ) {
            use rand::{Rng, SeedableRng};
            let dim = x.len();
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let g1 = ParamVector::new((0..dim).map(|_| rng.random_range(-5.0..5.0)).collect()).unwrap();
            let g2 = ParamVector::new((0..dim).map(|_| rng.random_range(-5.0..5.0)).collect()).unwrap();
            let x = ParamVector::new(x).unwrap();
            let alpha = 0.3;
            let combined = gd_step(&x, &g1.add(&g2), alpha).unwrap();
            let sequential = gd_step(&gd_step(&x, &g1, alpha).unwrap(), &g2, alpha).unwrap();
            for i in 0..dim {
                prop_assert!((combined[i] - sequential[i]).abs() <= 1e-12);
            }
        }
    }
}
