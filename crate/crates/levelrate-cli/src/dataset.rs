//! Dataset ingestion: CSV loading and the built-in synthetic generator.
//!
//! CSV format: UTF-8, header row, feature columns followed by an integer
//! `label` column, LF or CRLF line endings.

use std::path::Path;

use levelrate::landscape::Dataset;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::CliError;

/// Loads a labeled dataset, reporting malformed rows by 1-based line number.
pub fn load_dataset(path: &Path) -> Result<Dataset, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read dataset {}: {e}", path.display())))?;
    let mut lines = text.lines().enumerate();

    let (_, header) = lines
        .next()
        .ok_or_else(|| CliError::Config(format!("dataset {} is empty", path.display())))?;
    let columns: Vec<&str> = header.trim_end_matches('\r').split(',').map(str::trim).collect();
    if columns.len() < 2 {
        return Err(CliError::Config(format!(
            "dataset {} needs at least one feature column and a label column",
            path.display()
        )));
    }
    if columns.last() != Some(&"label") {
        return Err(CliError::Config(format!(
            "dataset {}: last header column must be 'label', got '{}'",
            path.display(),
            columns.last().unwrap_or(&"")
        )));
    }
    let num_features = columns.len() - 1;

    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for (idx, line) in lines {
        let line = line.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        let line_no = idx + 1;
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != num_features + 1 {
            return Err(CliError::Config(format!(
                "line {line_no}: expected {} fields, got {}",
                num_features + 1,
                fields.len()
            )));
        }
        let mut features = Vec::with_capacity(num_features);
        for (col, field) in fields[..num_features].iter().enumerate() {
            let value: f64 = field.parse().map_err(|_| {
                CliError::Config(format!(
                    "line {line_no}: feature column {} is not a number: '{field}'",
                    col + 1
                ))
            })?;
            if !value.is_finite() {
                return Err(CliError::Config(format!(
                    "line {line_no}: feature column {} is not finite",
                    col + 1
                )));
            }
            features.push(value);
        }
        let label: usize = fields[num_features].parse().map_err(|_| {
            CliError::Config(format!(
                "line {line_no}: label is not a non-negative integer: '{}'",
                fields[num_features]
            ))
        })?;
        rows.push(features);
        labels.push(label);
    }
    if rows.is_empty() {
        return Err(CliError::Config(format!(
            "dataset {} has a header but no rows",
            path.display()
        )));
    }
    let classes = labels.iter().max().copied().unwrap_or(0) + 1;
    Ok(Dataset::from_rows(rows, labels, classes.max(2))?)
}

/// Two 2-D Gaussian blobs with a 9:1 class imbalance, deterministic in the
/// seed. The majority class sits at (-1.5, 0), the minority at (1.5, 0),
/// both with unit variance. Counts are exact: `9n/10` and the remainder.
pub fn synthetic_imbalanced(n: usize, seed: u64) -> Result<Dataset, CliError> {
    if n < 10 {
        return Err(CliError::Config(format!(
            "synthetic dataset needs at least 10 samples, got {n}"
        )));
    }
    let majority = n * 9 / 10;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = |rng: &mut ChaCha8Rng| -> f64 {
        // Box-Muller, guarded away from ln(0)
        let u1: f64 = 1.0 - rng.random::<f64>();
        let u2: f64 = rng.random();
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    };
    let mut rows = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let label = usize::from(i >= majority);
        let center_x = if label == 0 { -1.5 } else { 1.5 };
        rows.push(vec![center_x + normal(&mut rng), normal(&mut rng)]);
        labels.push(label);
    }
    Ok(Dataset::from_rows(rows, labels, 2)?)
}
