//! Labeled datasets for classification objectives.

use crate::{Error, Result};

/// A batch of feature rows with integer class labels in `0..classes`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    features: Vec<f64>,
    labels: Vec<usize>,
    num_features: usize,
    classes: usize,
}

impl Dataset {
    pub fn from_rows(rows: Vec<Vec<f64>>, labels: Vec<usize>, classes: usize) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::Data("dataset must contain at least one row".into()));
        }
        if rows.len() != labels.len() {
            return Err(Error::Data(format!(
                "dataset has {} rows but {} labels",
                rows.len(),
                labels.len()
            )));
        }
        if classes < 2 {
            return Err(Error::Data(format!("dataset needs at least 2 classes, got {classes}")));
        }
        let num_features = rows[0].len();
        if num_features == 0 {
            return Err(Error::Data("dataset rows must have at least one feature".into()));
        }
        let mut features = Vec::with_capacity(rows.len() * num_features);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != num_features {
                return Err(Error::Data(format!(
                    "row {i} has {} features, expected {num_features}",
                    row.len()
                )));
            }
            if let Some(bad) = row.iter().find(|v| !v.is_finite()) {
                return Err(Error::Data(format!("row {i} has non-finite feature {bad}")));
            }
            features.extend_from_slice(row);
        }
        for (i, &label) in labels.iter().enumerate() {
            if label >= classes {
                return Err(Error::Data(format!(
                    "row {i} has label {label}, expected a class index below {classes}"
                )));
            }
        }
        Ok(Self { features, labels, num_features, classes })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn num_features(&self) -> usize {
        self.num_features
    }

    pub fn classes(&self) -> usize {
        self.classes
    }

    pub fn features(&self, i: usize) -> &[f64] {
        let start = i * self.num_features;
        &self.features[start..start + self.num_features]
    }

    pub fn label(&self, i: usize) -> usize {
        self.labels[i]
    }

    /// Number of rows per class, indexed by class.
    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0usize; self.classes];
        for &label in &self.labels {
            counts[label] += 1;
        }
        counts
    }

    /// The same rows in a caller-chosen order; useful for invariance tests.
    pub fn permuted(&self, order: &[usize]) -> Result<Self> {
        if order.len() != self.len() {
            return Err(Error::Data("permutation length does not match dataset".into()));
        }
        let rows = order.iter().map(|&i| self.features(i).to_vec()).collect();
        let labels = order.iter().map(|&i| self.label(i)).collect();
        Self::from_rows(rows, labels, self.classes)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builds_and_counts() {
        let d = Dataset::from_rows(
            vec![vec![0.0, 1.0], vec![2.0, 3.0], vec![4.0, 5.0]],
            vec![0, 1, 1],
            2,
        )
        .unwrap();
        assert_eq!(d.len(), 3);
        assert_eq!(d.num_features(), 2);
        assert_eq!(d.class_counts(), vec![1, 2]);
        assert_eq!(d.features(1), &[2.0, 3.0]);
        assert_eq!(d.label(2), 1);
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(Dataset::from_rows(vec![], vec![], 2).is_err());
        assert!(Dataset::from_rows(vec![vec![1.0]], vec![0, 1], 2).is_err());
        assert!(Dataset::from_rows(vec![vec![1.0], vec![1.0, 2.0]], vec![0, 1], 2).is_err());
        assert!(Dataset::from_rows(vec![vec![f64::NAN]], vec![0], 2).is_err());
        // label out of range
        assert!(Dataset::from_rows(vec![vec![1.0]], vec![2], 2).is_err());
    }
}
