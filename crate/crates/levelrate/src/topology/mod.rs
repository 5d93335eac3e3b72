//! Empirical connectivity of superlevel and sublevel sets of sampled 2-D
//! scalar fields.
//!
//! A field is sampled at cell centers over a rectangular box, thresholded
//! into a mask, and labeled with union-find under 4- or 8-adjacency. A mask
//! with at most one component counts as connected. Ties (cell value exactly
//! at the threshold) belong to both directions' masks.

mod union_find;

pub use union_find::DisjointSet;

use serde::{Deserialize, Serialize};

use crate::landscape::{DomainBox, Objective};
use crate::loss::temporal_modulation;
use crate::{Error, ParamVector, Result};

/// Which side of the threshold a mask keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// Cells with `value >= lambda`.
    Super,
    /// Cells with `value <= lambda`.
    Sub,
}

/// Neighborhood used for component labeling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Adjacency {
    Four,
    Eight,
}

/// A scalar field sampled at the centers of an `nx x ny` cell grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    bounds: DomainBox,
    nx: usize,
    ny: usize,
    values: Vec<f64>,
}

impl GridField {
    /// Builds a field from precomputed values (row-major over x, then y).
    pub fn from_values(bounds: DomainBox, nx: usize, ny: usize, values: Vec<f64>) -> Result<Self> {
        if bounds.dim() != 2 {
            return Err(Error::Dimension("grid bounds must be 2-D".into()));
        }
        if nx < 2 || ny < 2 {
            return Err(Error::Input(format!(
                "grid resolution must be at least 2 per axis, got {nx} x {ny}"
            )));
        }
        if values.len() != nx * ny {
            return Err(Error::Dimension(format!(
                "expected {} values for a {nx} x {ny} grid, got {}",
                nx * ny,
                values.len()
            )));
        }
        if let Some(bad) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Sampling(format!(
                "grid cell ({}, {}) holds non-finite value {}",
                bad / ny,
                bad % ny,
                values[bad]
            )));
        }
        Ok(Self { bounds, nx, ny, values })
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn bounds(&self) -> &DomainBox {
        &self.bounds
    }

    pub fn value(&self, ix: usize, iy: usize) -> f64 {
        self.values[ix * self.ny + iy]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Center of cell `(ix, iy)`.
    pub fn cell_center(&self, ix: usize, iy: usize) -> (f64, f64) {
        let wx = (self.bounds.hi()[0] - self.bounds.lo()[0]) / self.nx as f64;
        let wy = (self.bounds.hi()[1] - self.bounds.lo()[1]) / self.ny as f64;
        (self.bounds.lo()[0] + (ix as f64 + 0.5) * wx, self.bounds.lo()[1] + (iy as f64 + 0.5) * wy)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Smallest value among boundary cells; superlevel sets above this value
    /// are clipped by the sampling window.
    pub fn boundary_min(&self) -> f64 {
        let mut min = f64::INFINITY;
        for ix in 0..self.nx {
            for iy in 0..self.ny {
                if ix == 0 || iy == 0 || ix == self.nx - 1 || iy == self.ny - 1 {
                    min = min.min(self.value(ix, iy));
                }
            }
        }
        min
    }
}

/// Evaluates a 2-D objective at every cell center of the box.
pub fn sample_grid(
    obj: &dyn Objective,
    bounds: &DomainBox,
    nx: usize,
    ny: usize,
) -> Result<GridField> {
    if obj.dim() != 2 {
        return Err(Error::Dimension(format!(
            "grid sampling needs a 2-D objective, got dimension {}",
            obj.dim()
        )));
    }
    if bounds.dim() != 2 {
        return Err(Error::Dimension("grid bounds must be 2-D".into()));
    }
    if nx < 2 || ny < 2 {
        return Err(Error::Input(format!(
            "grid resolution must be at least 2 per axis, got {nx} x {ny}"
        )));
    }
    let wx = (bounds.hi()[0] - bounds.lo()[0]) / nx as f64;
    let wy = (bounds.hi()[1] - bounds.lo()[1]) / ny as f64;
    let mut values = Vec::with_capacity(nx * ny);
    for ix in 0..nx {
        let x = bounds.lo()[0] + (ix as f64 + 0.5) * wx;
        for iy in 0..ny {
            let y = bounds.lo()[1] + (iy as f64 + 0.5) * wy;
            let v = obj.eval(&ParamVector::new_unchecked(vec![x, y]))?;
            if !v.is_finite() {
                return Err(Error::Sampling(format!(
                    "objective {} is non-finite at cell ({ix}, {iy}) = ({x}, {y})",
                    obj.name()
                )));
            }
            values.push(v);
        }
    }
    GridField::from_values(bounds.clone(), nx, ny, values)
}

/// Boolean grid with the same layout as the field it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct Mask {
    nx: usize,
    ny: usize,
    cells: Vec<bool>,
}

impl Mask {
    pub fn from_cells(nx: usize, ny: usize, cells: Vec<bool>) -> Result<Self> {
        if cells.len() != nx * ny {
            return Err(Error::Dimension(format!(
                "expected {} cells for a {nx} x {ny} mask, got {}",
                nx * ny,
                cells.len()
            )));
        }
        Ok(Self { nx, ny, cells })
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn get(&self, ix: usize, iy: usize) -> bool {
        self.cells[ix * self.ny + iy]
    }

    pub fn count_true(&self) -> usize {
        self.cells.iter().filter(|c| **c).count()
    }

    pub fn cells(&self) -> &[bool] {
        &self.cells
    }
}

/// Thresholds a field with exact comparisons: `>= lambda` for super,
/// `<= lambda` for sub.
pub fn threshold_mask(field: &GridField, lambda: f64, direction: Direction) -> Mask {
    let cells = field
        .values
        .iter()
        .map(|v| match direction {
            Direction::Super => *v >= lambda,
            Direction::Sub => *v <= lambda,
        })
        .collect();
    Mask { nx: field.nx, ny: field.ny, cells }
}

/// Labels the true cells of a mask with union-find. Returns the component
/// count and a label grid (0 = background, labels start at 1).
pub fn connected_components(mask: &Mask, adjacency: Adjacency) -> (usize, Vec<u32>) {
    let (nx, ny) = (mask.nx, mask.ny);
    let mut forest = DisjointSet::new(nx * ny);
    let at = |ix: usize, iy: usize| ix * ny + iy;
    for ix in 0..nx {
        for iy in 0..ny {
            if !mask.cells[at(ix, iy)] {
                continue;
            }
            let here = at(ix, iy) as u32;
            if ix > 0 && mask.cells[at(ix - 1, iy)] {
                forest.union(here, at(ix - 1, iy) as u32);
            }
            if iy > 0 && mask.cells[at(ix, iy - 1)] {
                forest.union(here, at(ix, iy - 1) as u32);
            }
            if adjacency == Adjacency::Eight && ix > 0 {
                if iy > 0 && mask.cells[at(ix - 1, iy - 1)] {
                    forest.union(here, at(ix - 1, iy - 1) as u32);
                }
                if iy + 1 < ny && mask.cells[at(ix - 1, iy + 1)] {
                    forest.union(here, at(ix - 1, iy + 1) as u32);
                }
            }
        }
    }
    let mut labels = vec![0u32; nx * ny];
    let mut next_label = 0u32;
    let mut root_label = std::collections::HashMap::new();
    for (i, label_slot) in labels.iter_mut().enumerate() {
        if !mask.cells[i] {
            continue;
        }
        let root = forest.find(i as u32);
        *label_slot = *root_label.entry(root).or_insert_with(|| {
            next_label += 1;
            next_label
        });
    }
    (next_label as usize, labels)
}

/// Connectivity verdict at one threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LambdaEntry {
    pub lambda: f64,
    pub direction: Direction,
    pub component_count: usize,
    /// `component_count <= 1`.
    pub connected: bool,
    /// Fraction of grid cells inside the set.
    pub occupied_fraction: f64,
}

/// Verdicts for a ladder of thresholds, sorted ascending by lambda.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConnectivityReport {
    pub direction: Direction,
    pub adjacency: Adjacency,
    pub entries: Vec<LambdaEntry>,
}

/// Thresholds the field at every lambda and labels the resulting masks.
pub fn lambda_sweep(
    field: &GridField,
    lambdas: &[f64],
    direction: Direction,
    adjacency: Adjacency,
) -> Result<ConnectivityReport> {
    if lambdas.is_empty() {
        return Err(Error::Input("lambda sweep needs at least one threshold".into()));
    }
    if let Some(bad) = lambdas.iter().find(|l| !l.is_finite()) {
        return Err(Error::Input(format!("lambda sweep got non-finite threshold {bad}")));
    }
    let mut sorted = lambdas.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite thresholds"));
    let total = (field.nx * field.ny) as f64;
    let entries = sorted
        .into_iter()
        .map(|lambda| {
            let mask = threshold_mask(field, lambda, direction);
            let (count, _) = connected_components(&mask, adjacency);
            LambdaEntry {
                lambda,
                direction,
                component_count: count,
                connected: count <= 1,
                occupied_fraction: mask.count_true() as f64 / total,
            }
        })
        .collect();
    Ok(ConnectivityReport { direction, adjacency, entries })
}

/// A ladder of `count` thresholds strictly inside the field's value range,
/// placed at midpoints between order statistics so each threshold keeps a
/// margin to the nearest sampled value.
pub fn lambda_ladder(field: &GridField, count: usize) -> Result<Vec<f64>> {
    lambda_ladder_over(field.values(), count)
}

/// Same as [`lambda_ladder`], over an explicit value set.
pub fn lambda_ladder_over(values: &[f64], count: usize) -> Result<Vec<f64>> {
    if count == 0 {
        return Err(Error::Input("lambda ladder needs a positive count".into()));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite field values"));
    sorted.dedup();
    if sorted.len() < 2 {
        return Err(Error::Input(
            "lambda ladder needs a field with at least two distinct values".into(),
        ));
    }
    let m = sorted.len();
    let mut ladder = Vec::with_capacity(count);
    for k in 1..=count {
        let idx = (k * (m - 1) / (count + 1)).min(m - 2);
        ladder.push(0.5 * (sorted[idx] + sorted[idx + 1]));
    }
    ladder.sort_by(|a, b| a.partial_cmp(b).expect("finite ladder"));
    ladder.dedup();
    Ok(ladder)
}

struct ScaledObjective<'a> {
    inner: &'a dyn Objective,
    factor: f64,
    name: String,
}

impl Objective for ScaledObjective<'_> {
    fn name(&self) -> &str {
        &self.name
    }

    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn domain(&self) -> &DomainBox {
        self.inner.domain()
    }

    fn eval(&self, x: &ParamVector) -> Result<f64> {
        Ok(self.factor * self.inner.eval(x)?)
    }

    fn grad(&self, x: &ParamVector) -> Result<ParamVector> {
        Ok(self.inner.grad(x)?.scaled(self.factor))
    }
}

/// One comparison between the modulated field at `lambda` and the reference
/// field at `lambda / gamma(t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquiEntry {
    pub t: f64,
    pub gamma: f64,
    pub lambda: f64,
    pub scaled_lambda: f64,
    pub direction: Direction,
    pub count_modulated: usize,
    pub count_reference: usize,
}

/// Component-count agreement across modulation epochs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquiReport {
    pub adjacency: Adjacency,
    pub entries: Vec<EquiEntry>,
    pub mismatches: Vec<EquiEntry>,
}

impl EquiReport {
    pub fn is_clean(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Checks that scaling a field by `gamma(t) = 1 + kappa * exp(-delta * t)`
/// permutes thresholds without changing component counts: the modulated cost
/// thresholded at `lambda` is compared against the reference cost thresholded
/// at `lambda / gamma(t)`, for every requested epoch, threshold, and both
/// directions. The modulated side is sampled through its own evaluation path.
#[allow(clippy::too_many_arguments)]
pub fn equiconnectedness_check(
    obj_reference: &dyn Objective,
    bounds: &DomainBox,
    nx: usize,
    ny: usize,
    kappa: f64,
    delta: f64,
    t_list: &[f64],
    lambdas: &[f64],
    adjacency: Adjacency,
) -> Result<EquiReport> {
    if t_list.is_empty() {
        return Err(Error::Input("equiconnectedness needs at least one epoch".into()));
    }
    if lambdas.is_empty() {
        return Err(Error::Input("equiconnectedness needs at least one threshold".into()));
    }
    let reference = sample_grid(obj_reference, bounds, nx, ny)?;
    let mut entries = Vec::new();
    let mut mismatches = Vec::new();
    for &t in t_list {
        let gamma = temporal_modulation(t, kappa, delta)?;
        let scaled = ScaledObjective {
            inner: obj_reference,
            factor: gamma,
            name: format!("{}*{gamma}", obj_reference.name()),
        };
        let modulated = sample_grid(&scaled, bounds, nx, ny)?;
        for &lambda in lambdas {
            for direction in [Direction::Super, Direction::Sub] {
                let mask_mod = threshold_mask(&modulated, lambda, direction);
                let (count_modulated, _) = connected_components(&mask_mod, adjacency);
                let scaled_lambda = lambda / gamma;
                let mask_ref = threshold_mask(&reference, scaled_lambda, direction);
                let (count_reference, _) = connected_components(&mask_ref, adjacency);
                let entry = EquiEntry {
                    t,
                    gamma,
                    lambda,
                    scaled_lambda,
                    direction,
                    count_modulated,
                    count_reference,
                };
                if count_modulated != count_reference {
                    mismatches.push(entry);
                }
                entries.push(entry);
            }
        }
    }
    Ok(EquiReport { adjacency, entries, mismatches })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::landscape::{Himmelblau, Quadratic};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::collections::VecDeque;

    /// Flood-fill component counter, independent of the union-find path.
    pub(crate) fn bfs_component_count(mask: &Mask, adjacency: Adjacency) -> usize {
        let (nx, ny) = (mask.nx(), mask.ny());
        let mut seen = vec![false; nx * ny];
        let mut count = 0;
        let mut queue = VecDeque::new();
        for start in 0..nx * ny {
            if !mask.cells()[start] || seen[start] {
                continue;
            }
            count += 1;
            seen[start] = true;
            queue.push_back(start);
            while let Some(i) = queue.pop_front() {
                let (ix, iy) = (i / ny, i % ny);
                let mut push = |jx: isize, jy: isize| {
                    if jx < 0 || jy < 0 || jx as usize >= nx || jy as usize >= ny {
                        return;
                    }
                    let j = jx as usize * ny + jy as usize;
                    if mask.cells()[j] && !seen[j] {
                        seen[j] = true;
                        queue.push_back(j);
                    }
                };
                push(ix as isize - 1, iy as isize);
                push(ix as isize + 1, iy as isize);
                push(ix as isize, iy as isize - 1);
                push(ix as isize, iy as isize + 1);
                if adjacency == Adjacency::Eight {
                    push(ix as isize - 1, iy as isize - 1);
                    push(ix as isize - 1, iy as isize + 1);
                    push(ix as isize + 1, iy as isize - 1);
                    push(ix as isize + 1, iy as isize + 1);
                }
            }
        }
        count
    }

    pub(crate) fn random_mask(rng: &mut ChaCha8Rng, nx: usize, ny: usize, density: f64) -> Mask {
        let cells = (0..nx * ny).map(|_| rng.random::<f64>() < density).collect();
        Mask::from_cells(nx, ny, cells).unwrap()
    }

    struct ConstantField;

    impl Objective for ConstantField {
        fn name(&self) -> &str {
            "constant"
        }
        fn dim(&self) -> usize {
            2
        }
        fn domain(&self) -> &DomainBox {
            static BOX: std::sync::OnceLock<DomainBox> = std::sync::OnceLock::new();
            BOX.get_or_init(|| DomainBox::symmetric(2, 6.0).unwrap())
        }
        fn eval(&self, _x: &ParamVector) -> Result<f64> {
            Ok(2.5)
        }
        fn grad(&self, _x: &ParamVector) -> Result<ParamVector> {
            Ok(ParamVector::zeros(2))
        }
    }

    #[test]
    fn constant_objective_samples_flat() {
        let bounds = DomainBox::symmetric(2, 1.0).unwrap();
        let field = sample_grid(&ConstantField, &bounds, 4, 5).unwrap();
        assert!(field.values().iter().all(|v| *v == 2.5));
        assert_eq!(field.values().len(), 20);
    }

    #[test]
    fn quadratic_grid_is_symmetric_under_reflection() {
        let q = Quadratic::new(2).unwrap();
        let bounds = DomainBox::symmetric(2, 6.0).unwrap();
        let field = sample_grid(&q, &bounds, 17, 17).unwrap();
        for ix in 0..17 {
            for iy in 0..17 {
                let a = field.value(ix, iy);
                let b = field.value(16 - ix, 16 - iy);
                assert!((a - b).abs() < 1e-9, "({ix},{iy}): {a} vs {b}");
            }
        }
    }

    #[test]
    fn sampling_validates_inputs() {
        let q = Quadratic::new(2).unwrap();
        let bounds = DomainBox::symmetric(2, 6.0).unwrap();
        assert!(sample_grid(&q, &bounds, 1, 4).is_err());
        let q3 = Quadratic::new(3).unwrap();
        assert!(sample_grid(&q3, &bounds, 4, 4).is_err());
    }

    #[test]
    fn threshold_extremes_and_cover() {
        let q = Quadratic::new(2).unwrap();
        let bounds = DomainBox::symmetric(2, 6.0).unwrap();
        let field = sample_grid(&q, &bounds, 9, 9).unwrap();

        let below = field.min() - 1.0;
        let all = threshold_mask(&field, below, Direction::Super);
        assert_eq!(all.count_true(), 81);

        let above = field.max() + 1.0;
        let none = threshold_mask(&field, above, Direction::Super);
        assert_eq!(none.count_true(), 0);

        // every cell lands in at least one side; both only on exact ties
        let lambda = field.value(4, 4);
        let sup = threshold_mask(&field, lambda, Direction::Super);
        let sub = threshold_mask(&field, lambda, Direction::Sub);
        for i in 0..81 {
            assert!(sup.cells()[i] || sub.cells()[i]);
            if sup.cells()[i] && sub.cells()[i] {
                assert_eq!(field.values()[i], lambda);
            }
        }
    }

    #[test]
    fn component_count_basics() {
        let empty = Mask::from_cells(3, 3, vec![false; 9]).unwrap();
        assert_eq!(connected_components(&empty, Adjacency::Four).0, 0);
        assert_eq!(connected_components(&empty, Adjacency::Eight).0, 0);

        let full = Mask::from_cells(3, 3, vec![true; 9]).unwrap();
        assert_eq!(connected_components(&full, Adjacency::Four).0, 1);

        // checkerboard: isolated under 4-adjacency, joined under 8
        let cells: Vec<bool> = (0..16).map(|i| (i / 4 + i % 4) % 2 == 0).collect();
        let board = Mask::from_cells(4, 4, cells).unwrap();
        assert_eq!(connected_components(&board, Adjacency::Four).0, 8);
        assert_eq!(connected_components(&board, Adjacency::Eight).0, 1);
    }

    #[test]
    fn labels_partition_the_true_cells() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let mask = random_mask(&mut rng, 12, 9, 0.5);
        let (count, labels) = connected_components(&mask, Adjacency::Eight);
        for (i, &label) in labels.iter().enumerate() {
            assert_eq!(label > 0, mask.cells()[i]);
            assert!(label as usize <= count);
        }
        let distinct: std::collections::HashSet<u32> =
            labels.iter().copied().filter(|l| *l > 0).collect();
        assert_eq!(distinct.len(), count);
    }

    #[test]
    fn union_find_matches_bfs_on_random_masks() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for trial in 0..60 {
            let density = 0.1 + 0.8 * (trial as f64 / 59.0);
            let mask = random_mask(&mut rng, 16, 16, density);
            for adjacency in [Adjacency::Four, Adjacency::Eight] {
                let (uf, _) = connected_components(&mask, adjacency);
                let bfs = bfs_component_count(&mask, adjacency);
                assert_eq!(uf, bfs, "trial {trial}, {adjacency:?}");
            }
        }
    }

    #[test]
    fn quadratic_superlevel_connected_below_the_window_clip() {
        // the superlevel set of a convex bowl is the complement of a disk;
        // it stays connected while the disk fits inside the sampling window,
        // and splits into the four corners once the disk crosses the edges
        let q = Quadratic::new(2).unwrap();
        let bounds = DomainBox::symmetric(2, 6.0).unwrap();
        let field = sample_grid(&q, &bounds, 101, 101).unwrap();
        let clip = field.boundary_min();

        let inside: Vec<f64> =
            lambda_ladder(&field, 60).unwrap().into_iter().filter(|l| *l < clip).collect();
        assert!(inside.len() >= 20);
        let report = lambda_sweep(&field, &inside, Direction::Super, Adjacency::Eight).unwrap();
        assert!(report.entries.iter().all(|e| e.connected), "{report:?}");

        // above the clip the four corners separate
        let outside = 0.5 * (clip + field.max());
        let clipped = lambda_sweep(&field, &[outside], Direction::Super, Adjacency::Eight).unwrap();
        assert_eq!(clipped.entries[0].component_count, 4);
    }

    #[test]
    fn himmelblau_grid_min_reaches_the_minima() {
        // cell centers land close enough to the four zeros that the sampled
        // minimum is tiny
        let h = Himmelblau::new();
        let bounds = DomainBox::symmetric(2, 6.0).unwrap();
        let field = sample_grid(&h, &bounds, 401, 401).unwrap();
        assert!(field.min() < 0.01, "grid min {}", field.min());
    }

    #[test]
    fn himmelblau_sublevel_splits_into_four_basins() {
        let h = Himmelblau::new();
        let bounds = DomainBox::symmetric(2, 6.0).unwrap();
        let field = sample_grid(&h, &bounds, 201, 201).unwrap();
        let report = lambda_sweep(&field, &[10.0], Direction::Sub, Adjacency::Eight).unwrap();
        assert_eq!(report.entries[0].component_count, 4, "{:?}", report.entries[0]);

        // above the grid maximum everything joins into one component
        let all =
            lambda_sweep(&field, &[field.max() + 1.0], Direction::Sub, Adjacency::Eight).unwrap();
        assert_eq!(all.entries[0].component_count, 1);

        assert!(lambda_sweep(&field, &[], Direction::Sub, Adjacency::Eight).is_err());
    }

    #[test]
    fn sweep_entries_are_sorted() {
        let q = Quadratic::new(2).unwrap();
        let bounds = DomainBox::symmetric(2, 6.0).unwrap();
        let field = sample_grid(&q, &bounds, 21, 21).unwrap();
        let report =
            lambda_sweep(&field, &[5.0, 1.0, 3.0], Direction::Sub, Adjacency::Eight).unwrap();
        let lambdas: Vec<f64> = report.entries.iter().map(|e| e.lambda).collect();
        assert_eq!(lambdas, vec![1.0, 3.0, 5.0]);
    }

    #[test]
    fn ladder_stays_inside_the_range() {
        let q = Quadratic::new(2).unwrap();
        let bounds = DomainBox::symmetric(2, 6.0).unwrap();
        let field = sample_grid(&q, &bounds, 51, 51).unwrap();
        let ladder = lambda_ladder(&field, 20).unwrap();
        assert!(!ladder.is_empty());
        for l in &ladder {
            assert!(*l > field.min() && *l < field.max());
        }
        for pair in ladder.windows(2) {
            assert!(pair[0] < pair[1]);
        }
    }

    #[test]
    fn equiconnectedness_with_zero_amplitude_is_trivially_clean() {
        let q = Quadratic::new(2).unwrap();
        let bounds = DomainBox::symmetric(2, 6.0).unwrap();
        let field = sample_grid(&q, &bounds, 41, 41).unwrap();
        let lambdas = lambda_ladder(&field, 10).unwrap();
        let report = equiconnectedness_check(
            &q,
            &bounds,
            41,
            41,
            0.0,
            1.0,
            &[0.0, 1.0, 5.0],
            &lambdas,
            Adjacency::Eight,
        )
        .unwrap();
        assert!(report.is_clean());
        assert!(report.entries.iter().all(|e| e.gamma == 1.0));
    }

    #[test]
    fn equiconnectedness_on_the_quadratic() {
        let q = Quadratic::new(2).unwrap();
        let bounds = DomainBox::symmetric(2, 6.0).unwrap();
        let field = sample_grid(&q, &bounds, 101, 101).unwrap();
        // thresholds over the modulated field's widest range (gamma(0) = 2)
        let widest: Vec<f64> = field.values().iter().map(|v| 2.0 * v).collect();
        let lambdas = lambda_ladder_over(&widest, 20).unwrap();
        let report = equiconnectedness_check(
            &q,
            &bounds,
            101,
            101,
            1.0,
            0.5,
            &[0.0, 1.0, 5.0],
            &lambdas,
            Adjacency::Eight,
        )
        .unwrap();
        assert!(report.is_clean(), "mismatches: {:?}", report.mismatches);
        assert_eq!(report.entries.len(), 3 * lambdas.len() * 2);
    }

    proptest! {
        // super-masks shrink as lambda grows
        #[test]
        fn super_masks_are_nested(lambda1 in -5.0..5.0f64, lambda2 in -5.0..5.0f64) {
            let (lo, hi) = if lambda1 <= lambda2 { (lambda1, lambda2) } else { (lambda2, lambda1) };
            let q = Quadratic::new(2).unwrap();
            let bounds = DomainBox::symmetric(2, 3.0).unwrap();
            let field = sample_grid(&q, &bounds, 15, 15).unwrap();
            let wide = threshold_mask(&field, lo, Direction::Super);
            let tight = threshold_mask(&field, hi, Direction::Super);
            for i in 0..wide.cells().len() {
                prop_assert!(!tight.cells()[i] || wide.cells()[i]);
            }
        }

        // counting components of c * F at c * lambda equals counting F at lambda
        #[test]
        fn positive_scaling_preserves_counts(seed in 0u64..500, c in 0.1..10.0f64) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let values: Vec<f64> = (0..64).map(|_| rng.random_range(-10.0..10.0)).collect();
            let bounds = DomainBox::symmetric(2, 1.0).unwrap();
            let field = GridField::from_values(bounds.clone(), 8, 8, values.clone()).unwrap();
            let scaled_values: Vec<f64> = values.iter().map(|v| c * v).collect();
            let scaled = GridField::from_values(bounds, 8, 8, scaled_values).unwrap();
            let lambda = rng.random_range(-9.0..9.0);
            for direction in [Direction::Super, Direction::Sub] {
                let base = threshold_mask(&field, lambda, direction);
                let rescaled = threshold_mask(&scaled, c * lambda, direction);
                for adjacency in [Adjacency::Four, Adjacency::Eight] {
                    prop_assert_eq!(
                        connected_components(&base, adjacency).0,
                        connected_components(&rescaled, adjacency).0
                    );
                }
            }
        }

        // diagonal links only merge components
        #[test]
        fn eight_adjacency_never_exceeds_four(seed in 0u64..500) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let density = rng.random_range(0.2..0.8);
            let mask = random_mask(&mut rng, 12, 12, density);
            let four = connected_components(&mask, Adjacency::Four).0;
            let eight = connected_components(&mask, Adjacency::Eight).0;
            prop_assert!(eight <= four);
        }
    }
}
