//! Test objectives with analytic gradients and a finite-difference oracle.
//!
//! Objectives expose evaluation and a hand-derived gradient over an
//! axis-aligned domain box. The box documents where the fixture is intended
//! to be sampled; evaluation itself only validates dimension and finiteness
//! so that optimizers can probe diverging iterates.

mod data;
mod mlp;

pub use data::Dataset;
pub use mlp::{mlp_loss_and_grad, MlpObjective, MlpParams, MlpSpec};

use serde::{Deserialize, Serialize};

use crate::{Error, ParamVector, Result};

/// Axis-aligned box with `lo < hi` per dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainBox {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl DomainBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.is_empty() || lo.len() != hi.len() {
            return Err(Error::Dimension(format!(
                "domain box bounds must be non-empty and of equal length, got {} and {}",
                lo.len(),
                hi.len()
            )));
        }
        for (i, (a, b)) in lo.iter().zip(&hi).enumerate() {
            if !a.is_finite() || !b.is_finite() || a >= b {
                return Err(Error::Parameter(format!(
                    "domain box axis {i} must satisfy lo < hi with finite bounds, got [{a}, {b}]"
                )));
            }
        }
        Ok(Self { lo, hi })
    }

    /// `[-half_width, half_width]` on every axis.
    pub fn symmetric(dim: usize, half_width: f64) -> Result<Self> {
        Self::new(vec![-half_width; dim.max(1)], vec![half_width; dim.max(1)])
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[f64] {
        &self.lo
    }

    pub fn hi(&self) -> &[f64] {
        &self.hi
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x.iter().zip(self.lo.iter().zip(&self.hi)).all(|(v, (a, b))| *v >= *a && *v <= *b)
    }

    /// The box with `margin` shaved off every face.
    pub fn shrunk(&self, margin: f64) -> Result<Self> {
        Self::new(
            self.lo.iter().map(|a| a + margin).collect(),
            self.hi.iter().map(|b| b - margin).collect(),
        )
    }
}

/// A named scalar field with an analytic gradient.
pub trait Objective: Send + Sync {
    fn name(&self) -> &str;
    fn dim(&self) -> usize;
    fn domain(&self) -> &DomainBox;
    fn eval(&self, x: &ParamVector) -> Result<f64>;
    fn grad(&self, x: &ParamVector) -> Result<ParamVector>;
}

pub(crate) fn check_point(name: &str, dim: usize, x: &ParamVector) -> Result<()> {
    if x.dim() != dim {
        return Err(Error::Dimension(format!("{name} expects dimension {dim}, got {}", x.dim())));
    }
    if !x.is_finite() {
        return Err(Error::Input(format!("{name} evaluated at a non-finite point")));
    }
    Ok(())
}

/// Convex fixture `0.5 * |x|^2` with gradient `x`.
#[derive(Debug, Clone)]
pub struct Quadratic {
    dim: usize,
    domain: DomainBox,
}

impl Quadratic {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Dimension("quadratic requires dimension >= 1".into()));
        }
        Ok(Self { dim, domain: DomainBox::symmetric(dim, 6.0)? })
    }
}

impl Objective for Quadratic {
    fn name(&self) -> &str {
        "quadratic"
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn domain(&self) -> &DomainBox {
        &self.domain
    }

    fn eval(&self, x: &ParamVector) -> Result<f64> {
        check_point(self.name(), self.dim, x)?;
        Ok(0.5 * x.norm_sq())
    }

    fn grad(&self, x: &ParamVector) -> Result<ParamVector> {
        check_point(self.name(), self.dim, x)?;
        Ok(x.clone())
    }
}

/// Banana-valley fixture `(1 - x)^2 + 100 (y - x^2)^2`, minimum at `(1, 1)`.
#[derive(Debug, Clone)]
pub struct Rosenbrock {
    domain: DomainBox,
}

impl Rosenbrock {
    pub fn new() -> Self {
        Self { domain: DomainBox::symmetric(2, 6.0).expect("static bounds") }
    }
}

impl Default for Rosenbrock {
    fn default() -> Self {
        Self::new()
    }
}

impl Objective for Rosenbrock {
    fn name(&self) -> &str {
        "rosenbrock"
    }

    fn dim(&self) -> usize {
        2
    }

    fn domain(&self) -> &DomainBox {
        &self.domain
    }

    fn eval(&self, p: &ParamVector) -> Result<f64> {
        check_point(self.name(), 2, p)?;
        let (x, y) = (p[0], p[1]);
        Ok((1.0 - x).powi(2) + 100.0 * (y - x * x).powi(2))
    }

    fn grad(&self, p: &ParamVector) -> Result<ParamVector> {
        check_point(self.name(), 2, p)?;
        let (x, y) = (p[0], p[1]);
        let gx = -2.0 * (1.0 - x) - 400.0 * x * (y - x * x);
        let gy = 200.0 * (y - x * x);
        Ok(ParamVector::new_unchecked(vec![gx, gy]))
    }
}

/// Four-minima fixture `(x^2 + y - 11)^2 + (x + y^2 - 7)^2`.
#[derive(Debug, Clone)]
pub struct Himmelblau {
    domain: DomainBox,
}

impl Himmelblau {
    pub fn new() -> Self {
        Self { domain: DomainBox::symmetric(2, 6.0).expect("static bounds") }
    }
}

impl Default for Himmelblau {
    fn default() -> Self {
        Self::new()
    }
}

impl Objective for Himmelblau {
    fn name(&self) -> &str {
        "himmelblau"
    }

    fn dim(&self) -> usize {
        2
    }

    fn domain(&self) -> &DomainBox {
        &self.domain
    }

    fn eval(&self, p: &ParamVector) -> Result<f64> {
        check_point(self.name(), 2, p)?;
        let (x, y) = (p[0], p[1]);
        Ok((x * x + y - 11.0).powi(2) + (x + y * y - 7.0).powi(2))
    }

    fn grad(&self, p: &ParamVector) -> Result<ParamVector> {
        check_point(self.name(), 2, p)?;
        let (x, y) = (p[0], p[1]);
        let a = x * x + y - 11.0;
        let b = x + y * y - 7.0;
        Ok(ParamVector::new_unchecked(vec![4.0 * x * a + 2.0 * b, 2.0 * a + 4.0 * y * b]))
    }
}

/// A 2-D slice of a higher-dimensional objective: two chosen coordinates vary,
/// the rest stay frozen at a base point.
pub struct SliceObjective {
    inner: Box<dyn Objective>,
    base: ParamVector,
    axes: (usize, usize),
    domain: DomainBox,
    name: String,
}

impl SliceObjective {
    pub fn new(
        inner: Box<dyn Objective>,
        base: ParamVector,
        axes: (usize, usize),
        domain: DomainBox,
    ) -> Result<Self> {
        if base.dim() != inner.dim() {
            return Err(Error::Dimension(format!(
                "slice base has dimension {}, objective expects {}",
                base.dim(),
                inner.dim()
            )));
        }
        if axes.0 == axes.1 || axes.0 >= inner.dim() || axes.1 >= inner.dim() {
            return Err(Error::Parameter(format!(
                "slice axes ({}, {}) must be distinct and below {}",
                axes.0,
                axes.1,
                inner.dim()
            )));
        }
        if domain.dim() != 2 {
            return Err(Error::Dimension("slice domain must be 2-D".into()));
        }
        let name = format!("{}[slice {},{}]", inner.name(), axes.0, axes.1);
        Ok(Self { inner, base, axes, domain, name })
    }

    fn lift(&self, p: &ParamVector) -> ParamVector {
        let mut full = self.base.as_slice().to_vec();
        full[self.axes.0] = p[0];
        full[self.axes.1] = p[1];
        ParamVector::new_unchecked(full)
    }
}

impl Objective for SliceObjective {
    fn name(&self) -> &str {
        &self.name
    }

    fn dim(&self) -> usize {
        2
    }

    fn domain(&self) -> &DomainBox {
        &self.domain
    }

    fn eval(&self, p: &ParamVector) -> Result<f64> {
        check_point(&self.name, 2, p)?;
        self.inner.eval(&self.lift(p))
    }

    fn grad(&self, p: &ParamVector) -> Result<ParamVector> {
        check_point(&self.name, 2, p)?;
        let full = self.inner.grad(&self.lift(p))?;
        Ok(ParamVector::new_unchecked(vec![full[self.axes.0], full[self.axes.1]]))
    }
}

/// Central-difference gradient `(f(x + h e_i) - f(x - h e_i)) / 2h`.
///
/// The oracle against which every analytic gradient in this crate is checked.
pub fn finite_diff_grad(obj: &dyn Objective, x: &ParamVector, h: f64) -> Result<ParamVector> {
    if h <= 0.0 || !h.is_finite() {
        return Err(Error::Parameter(format!("step size must be positive and finite, got {h}")));
    }
    check_point(obj.name(), obj.dim(), x)?;
    let mut probe = x.as_slice().to_vec();
    let mut grad = Vec::with_capacity(x.dim());
    for i in 0..x.dim() {
        let orig = probe[i];
        probe[i] = orig + h;
        let plus = obj.eval(&ParamVector::new_unchecked(probe.clone()))?;
        probe[i] = orig - h;
        let minus = obj.eval(&ParamVector::new_unchecked(probe.clone()))?;
        probe[i] = orig;
        grad.push((plus - minus) / (2.0 * h));
    }
    Ok(ParamVector::new_unchecked(grad))
}
