//! Shifted integer grids and the functions defined on them.
//!
//! Fractional sums and differences map functions between unit-spaced
//! lattices `{a, a+1, a+2, ...}` whose base point `a` is generally not an
//! integer. [`ShiftedGrid`] stores such a lattice; [`GridFunction`] attaches
//! real values to it.

use crate::error::FracError;

/// Tolerance for deciding whether a real number lies on a shifted lattice.
/// Grids are built by repeatedly adding 1 to the base point, so any drift is
/// far below this.
pub const LATTICE_TOL: f64 = 1e-9;

/// A finite unit-spaced lattice `{offset, offset+1, ..., offset+count-1}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftedGrid {
    offset: f64,
    count: usize,
}

impl ShiftedGrid {
    pub fn new(offset: f64, count: usize) -> Result<Self, FracError> {
        if count == 0 {
            return Err(FracError::Domain("grid must contain at least one point".into()));
        }
        if !offset.is_finite() {
            return Err(FracError::Domain("grid offset must be finite".into()));
        }
        Ok(Self { offset, count })
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn count(&self) -> usize {
        self.count
    }

    /// The i-th lattice point `offset + i`.
    pub fn point(&self, index: usize) -> f64 {
        debug_assert!(index < self.count);
        self.offset + index as f64
    }

    /// Inverse of [`point`](Self::point) within [`LATTICE_TOL`].
    pub fn index_of(&self, t: f64) -> Option<usize> {
        let rel = t - self.offset;
        let idx = rel.round();
        if (rel - idx).abs() > LATTICE_TOL || idx < 0.0 || idx >= self.count as f64 {
            return None;
        }
        Some(idx as usize)
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.count).map(move |i| self.point(i))
    }
}

/// Real values on a [`ShiftedGrid`], with the sup norm.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    grid: ShiftedGrid,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(grid: ShiftedGrid, values: Vec<f64>) -> Result<Self, FracError> {
        if values.len() != grid.count() {
            return Err(FracError::Domain(format!(
                "value count {} does not match grid size {}",
                values.len(),
                grid.count()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(FracError::Domain("grid function values must be finite".into()));
        }
        Ok(Self { grid, values })
    }

    pub fn constant(grid: ShiftedGrid, value: f64) -> Result<Self, FracError> {
        Self::new(grid, vec![value; grid.count()])
    }

    /// Builds values pointwise from the lattice points.
    pub fn from_fn(grid: ShiftedGrid, mut f: impl FnMut(f64) -> f64) -> Result<Self, FracError> {
        let values = grid.points().map(&mut f).collect();
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &ShiftedGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, index: usize) -> f64 {
        self.values[index]
    }

    /// Sup norm `max_i |y_i|`.
    pub fn norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Sup distance to another function on the same grid.
    pub fn distance(&self, other: &GridFunction) -> f64 {
        debug_assert_eq!(self.grid, other.grid);
        self.values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }
}
