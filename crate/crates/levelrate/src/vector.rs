//! Dense parameter vectors.

use crate::{Error, Result};

/// A dense vector of optimization parameters.
///
/// [`ParamVector::new`] enforces that the vector is non-empty and every entry
/// is finite. Optimizer internals that screen for divergence themselves may
/// bypass the check with [`ParamVector::new_unchecked`].
#[derive(Debug, Clone, PartialEq)]
pub struct ParamVector {
    values: Vec<f64>,
}

impl ParamVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Input("parameter vector must not be empty".into()));
        }
        if let Some(bad) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Input(format!(
                "parameter vector entry {bad} is not finite: {}",
                values[bad]
            )));
        }
        Ok(Self { values })
    }

    pub fn from_slice(values: &[f64]) -> Result<Self> {
        Self::new(values.to_vec())
    }

    /// Builds a vector without the finiteness check.
    pub fn new_unchecked(values: Vec<f64>) -> Self {
        debug_assert!(!values.is_empty());
        Self { values }
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "parameter vector dimension must be >= 1");
        Self { values: vec![0.0; dim] }
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.values
    }

    pub fn iter(&self) -> std::slice::Iter<'_, f64> {
        self.values.iter()
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn norm_sq(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }

    /// Euclidean norm.
    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// Euclidean inner product. Panics on dimension mismatch; public
    /// operations validate dimensions at their own boundaries.
    pub fn dot(&self, other: &Self) -> f64 {
        assert_eq!(self.dim(), other.dim(), "dot of mismatched dimensions");
        self.values.iter().zip(&other.values).map(|(a, b)| a * b).sum()
    }

    /// `self + factor * other`.
    pub fn add_scaled(&self, other: &Self, factor: f64) -> Self {
        assert_eq!(self.dim(), other.dim(), "add_scaled of mismatched dimensions");
        Self::new_unchecked(
            self.values.iter().zip(&other.values).map(|(a, b)| a + factor * b).collect(),
        )
    }

    pub fn add(&self, other: &Self) -> Self {
        self.add_scaled(other, 1.0)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self::new_unchecked(self.values.iter().map(|v| factor * v).collect())
    }

    pub fn distance(&self, other: &Self) -> f64 {
        assert_eq!(self.dim(), other.dim(), "distance of mismatched dimensions");
        self.values.iter().zip(&other.values).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
    }
}

impl std::ops::Index<usize> for ParamVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.values[i]
    }
}
