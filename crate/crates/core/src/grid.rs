//! Discrete capacity levels per DER.

use crate::error::{Error, Result};
use crate::model::{DerSpec, DesignSpace, MicrogridDesign};

/// Relative tolerance used to decide whether a capacity sits on a grid point.
const ON_GRID_RTOL: f64 = 1e-9;

/// Ascending capacities `{l, l + c, ..., l + n·c = u}` for one DER.
#[derive(Debug, Clone, PartialEq)]
pub struct CapacityGrid {
    points: Vec<f64>,
    spacing: f64,
}

impl CapacityGrid {
    /// Evenly spaced grid with `level_points` points (`level_points - 1` intervals).
    pub fn new(spec: &DerSpec, level_points: usize) -> Result<Self> {
        spec.validate()?;
        if level_points < 2 {
            return Err(Error::invalid(format!(
                "{}: need at least 2 capacity levels, got {level_points}",
                spec.name
            )));
        }
        let (lower, upper) = (spec.lower_bound, spec.upper_bound);
        if lower == upper {
            return Err(Error::invalid(format!(
                "{}: degenerate capacity range [{lower}, {upper}]",
                spec.name
            )));
        }
        let intervals = level_points - 1;
        let range = upper - lower;
        let spacing = range / intervals as f64;
        let points = (0..=intervals)
            .map(|k| {
                if k == intervals {
                    upper
                } else {
                    lower + range * k as f64 / intervals as f64
                }
            })
            .collect();
        Ok(CapacityGrid { points, spacing })
    }

    /// Like [`CapacityGrid::new`] but interior points are rounded to the
    /// nearest multiple of `precision`. Fails when rounding merges levels.
    pub fn with_precision(spec: &DerSpec, level_points: usize, precision: f64) -> Result<Self> {
        let mut grid = CapacityGrid::new(spec, level_points)?;
        if !(precision > 0.0 && precision.is_finite()) {
            return Err(Error::invalid(format!("capacity precision must be positive, got {precision}")));
        }
        let last = grid.points.len() - 1;
        for p in &mut grid.points[1..last] {
            *p = (*p / precision).round() * precision;
        }
        if grid.points.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid(format!(
                "{}: precision {precision} is too coarse for {level_points} levels",
                spec.name
            )));
        }
        Ok(grid)
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// Number of intervals `n` (one less than the number of points).
    pub fn intervals(&self) -> usize {
        self.points.len() - 1
    }

    pub fn lower(&self) -> f64 {
        self.points[0]
    }

    pub fn upper(&self) -> f64 {
        self.points[self.points.len() - 1]
    }

    pub fn point(&self, level: usize) -> f64 {
        self.points[level]
    }

    fn tolerance(&self) -> f64 {
        ON_GRID_RTOL * self.upper().abs().max(self.spacing.abs()).max(1.0)
    }

    /// Index of the nearest point; exact midpoints resolve to the lower one.
    pub fn nearest_level(&self, capacity: f64) -> usize {
        let above = self.points.partition_point(|&p| p < capacity);
        if above == 0 {
            return 0;
        }
        if above == self.points.len() {
            return self.points.len() - 1;
        }
        let lo = above - 1;
        if self.points[above] - capacity < capacity - self.points[lo] {
            above
        } else {
            lo
        }
    }

    pub fn snap(&self, capacity: f64) -> f64 {
        self.points[self.nearest_level(capacity)]
    }

    /// Index of `capacity` if it lies on the grid.
    pub fn level_of(&self, capacity: f64) -> Option<usize> {
        let level = self.nearest_level(capacity);
        ((self.points[level] - capacity).abs() <= self.tolerance()).then_some(level)
    }

    /// One level below `capacity`, clamped at the lower bound. Off-grid
    /// capacities drop to the highest grid point strictly below them.
    pub fn level_below(&self, capacity: f64) -> f64 {
        let tol = self.tolerance();
        let below = self.points.partition_point(|&p| p < capacity - tol);
        if below == 0 {
            self.lower()
        } else {
            self.points[below - 1]
        }
    }
}

/// One grid per DER of a design space, all at the same level count.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignGrids {
    grids: Vec<CapacityGrid>,
}

impl DesignGrids {
    pub fn new(space: &DesignSpace, level_points: usize) -> Result<Self> {
        let grids = space
            .ders()
            .iter()
            .map(|der| CapacityGrid::new(der, level_points))
            .collect::<Result<_>>()?;
        Ok(DesignGrids { grids })
    }

    pub fn from_grids(grids: Vec<CapacityGrid>) -> Self {
        DesignGrids { grids }
    }

    pub fn grids(&self) -> &[CapacityGrid] {
        &self.grids
    }

    pub fn get(&self, der: usize) -> &CapacityGrid {
        &self.grids[der]
    }

    pub fn len(&self) -> usize {
        self.grids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grids.is_empty()
    }

    /// Number of designs in the Cartesian product, saturating at `u128::MAX`.
    pub fn product_size(&self) -> u128 {
        self.grids
            .iter()
            .try_fold(1u128, |acc, g| acc.checked_mul(g.points.len() as u128))
            .unwrap_or(u128::MAX)
    }

    pub fn design_at(&self, levels: &[usize]) -> MicrogridDesign {
        MicrogridDesign::new(
            self.grids
                .iter()
                .zip(levels)
                .map(|(g, &l)| g.point(l))
                .collect(),
        )
    }

    pub fn nearest_levels(&self, design: &MicrogridDesign) -> Vec<usize> {
        self.grids
            .iter()
            .zip(design.capacities())
            .map(|(g, &c)| g.nearest_level(c))
            .collect()
    }
}

/// Replaces each capacity with its nearest grid point (midpoints round down).
pub fn snap_to_grid(design: &MicrogridDesign, grids: &DesignGrids) -> Result<MicrogridDesign> {
    if design.len() != grids.len() {
        return Err(Error::invalid(format!(
            "design has {} capacities but {} grids were given",
            design.len(),
            grids.len()
        )));
    }
    Ok(grids.design_at(&grids.nearest_levels(design)))
}
