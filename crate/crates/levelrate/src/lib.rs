//! Dynamic learning-rate optimization toolkit: decaying and gradient-adaptive
//! schedules, a superlevel-set learning-rate tuner, Lyapunov-style descent
//! monitoring, and empirical connectivity analysis of sampled loss landscapes.
//!
//! Module map:
//!
//! - [`landscape`]: test objectives with analytic gradients, a one-hidden-layer
//!   MLP classifier, labeled datasets, and a finite-difference gradient oracle.
//! - [`loss`]: softmax/cross-entropy machinery and the class-weighted, robust,
//!   regularized risk stack with temporal modulation.
//! - [`schedule`]: learning-rate schedules and the gradient-norm-adaptive rate.
//! - [`optimizer`]: gradient-descent drivers, the learning-rate tuner, and
//!   trajectory recording.
//! - [`stability`]: descent monitoring over recorded trajectories.
//! - [`topology`]: threshold masks, connected components, and lambda sweeps
//!   over sampled 2-D scalar fields.
//!
//! ```
//! use levelrate::landscape::Quadratic;
//! use levelrate::optimizer::{run_training, Method, RunConfig};
//! use levelrate::schedule::ExpDecaySchedule;
//! use levelrate::stability::check_monotone;
//! use levelrate::ParamVector;
//!
//! let objective = Quadratic::new(2)?;
//! let start = ParamVector::from_slice(&[5.0, -4.0])?;
//! let method = Method::ExpDecay(ExpDecaySchedule::new(0.5, 0.01)?);
//! let run = RunConfig { steps: 200, ..RunConfig::default() };
//!
//! let trajectory = run_training(&objective, &method, &start, &run)?;
//! assert!(trajectory.final_loss() < trajectory.initial_loss());
//!
//! let report = check_monotone(&trajectory, 0.0)?;
//! assert!(report.monotone);
//! # Ok::<(), levelrate::Error>(())
//! ```

pub mod error;
pub mod landscape;
pub mod loss;
pub mod optimizer;
pub mod schedule;
pub mod stability;
pub mod topology;
pub mod vector;

pub use error::{Error, Result};
pub use vector::ParamVector;
