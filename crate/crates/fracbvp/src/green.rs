//! Green's function of the linear fractional boundary value problem.
//!
//! For 1 < ν ≤ 2 and b ≥ 1, the solution of `-Δᵛy(t) = g(t)` (t = 0..b) with
//! `y(ν-2) = y(ν+b) = 0` is `y(t) = Σ_s G(t,s) g(s)`, where
//!
//! ```text
//! G(t,s) = (1/Γν) [ t^(ν-1) (ν+b-s-1)^(ν-1) / (ν+b)^(ν-1)
//!                   - (t-s-1)^(ν-1)·𝟙{s ≤ t-ν} ]
//! ```
//!
//! Construction tabulates G on the full lattice and immediately checks it
//! against an independent oracle: the same equation assembled row by row
//! through [`fractional_difference`] and solved as a dense linear system.
//! Disagreement beyond tolerance is a construction bug, and `build` refuses
//! to return the matrix.

use nalgebra::{DMatrix, DVector};

use crate::error::SolverError;
use crate::frac::{falling_factorial, fractional_difference, FracOrder};
use crate::gamma::gamma;
use crate::grid::{GridFunction, ShiftedGrid, LATTICE_TOL};

/// Tolerance for the construction-time oracle comparison.
const VALIDATION_TOL: f64 = 1e-8;

/// Entries this far below zero fail the nonnegativity check; smaller
/// negatives are roundoff and are clamped after validation.
const NEGATIVITY_TOL: f64 = -1e-12;

/// Tabulated Green's function with its grid geometry.
///
/// Rows index the lattice `t = ν-2+i`, i = 0..b+2; columns index s = 0..b.
/// The two boundary rows are identically zero and all entries are
/// nonnegative (clamped after validation).
#[derive(Debug, Clone)]
pub struct GreenMatrix {
    order: FracOrder,
    b: u32,
    grid: ShiftedGrid,
    /// Row-major, rows() x cols().
    entries: Vec<f64>,
}

impl GreenMatrix {
    /// Tabulates and validates the kernel.
    pub fn build(order: FracOrder, b: u32) -> Result<Self, SolverError> {
        if b < 1 {
            return Err(SolverError::InvalidProblem("b must be at least 1".into()));
        }
        let nu = order.value();
        let grid = ShiftedGrid::new(nu - 2.0, b as usize + 3)?;
        let rows = b as usize + 3;
        let cols = b as usize + 1;
        let mut entries = vec![0.0; rows * cols];
        let denom = falling_factorial(nu + b as f64, nu - 1.0)?;
        let gamma_nu = gamma(nu);
        for i in 1..rows - 1 {
            let t = grid.point(i);
            let t_factor = falling_factorial(t, nu - 1.0)?;
            for s in 0..cols {
                let mut v = t_factor * falling_factorial(nu + (b - s as u32) as f64 - 1.0, nu - 1.0)?
                    / denom;
                if s + 2 <= i {
                    v -= falling_factorial(nu - 1.0 + (i - s - 2) as f64, nu - 1.0)?;
                }
                entries[i * cols + s] = v / gamma_nu;
            }
        }
        // Row i = 0 vanishes because (ν-2)^(ν-1) = 0; at i = b+2 the two
        // terms cancel algebraically, so both boundary rows are exact zeros.
        let green = Self { order, b, grid, entries };
        green.check_nonnegative()?;
        let oracle = DenseOracle::new(order, b)?;
        for rhs in [vec![1.0; cols], (0..cols).map(|s| 1.0 + s as f64).collect()] {
            let discrepancy = green.validate_against(&oracle, &rhs)?;
            if discrepancy > VALIDATION_TOL {
                return Err(SolverError::Validation {
                    discrepancy,
                    tolerance: VALIDATION_TOL,
                });
            }
        }
        Ok(green.clamped())
    }

    fn check_nonnegative(&self) -> Result<(), SolverError> {
        for (idx, &v) in self.entries.iter().enumerate() {
            if v < NEGATIVITY_TOL {
                return Err(SolverError::Validation {
                    discrepancy: -v,
                    tolerance: -NEGATIVITY_TOL,
                });
            }
            debug_assert!(v.is_finite(), "non-finite kernel entry at {idx}");
        }
        Ok(())
    }

    fn clamped(mut self) -> Self {
        for v in &mut self.entries {
            if *v < 0.0 {
                *v = 0.0;
            }
        }
        self
    }

    pub fn order(&self) -> FracOrder {
        self.order
    }

    pub fn b(&self) -> u32 {
        self.b
    }

    /// The full lattice `{ν-2, ..., ν+b}` (b+3 points).
    pub fn grid(&self) -> &ShiftedGrid {
        &self.grid
    }

    /// Number of rows, b+3.
    pub fn rows(&self) -> usize {
        self.b as usize + 3
    }

    /// Number of columns, b+1.
    pub fn cols(&self) -> usize {
        self.b as usize + 1
    }

    pub fn entry(&self, row: usize, col: usize) -> f64 {
        self.entries[row * self.cols() + col]
    }

    /// `y(t) = Σ_s G(t,s) rhs(s)` over the full lattice.
    pub fn solve_linear(&self, rhs: &[f64]) -> Result<GridFunction, SolverError> {
        if rhs.len() != self.cols() {
            return Err(SolverError::InvalidProblem(format!(
                "rhs has {} entries, expected {}",
                rhs.len(),
                self.cols()
            )));
        }
        let values = (0..self.rows())
            .map(|i| (0..self.cols()).map(|s| self.entry(i, s) * rhs[s]).sum())
            .collect();
        Ok(GridFunction::new(self.grid, values)?)
    }

    /// Compares the kernel against the direct dense solve of the same
    /// problem; returns `‖y_kernel - y_direct‖ / (1 + ‖y_direct‖)`.
    ///
    /// The direct path assembles each equation through
    /// [`fractional_difference`] applied to unit vectors, so it shares no
    /// code with the closed form it is checking.
    pub fn validate(&self, rhs: &[f64]) -> Result<f64, SolverError> {
        self.validate_against(&DenseOracle::new(self.order, self.b)?, rhs)
    }

    /// [`validate`](Self::validate) with a prebuilt oracle, for checking
    /// many right-hand sides against one factorization.
    pub fn validate_against(&self, oracle: &DenseOracle, rhs: &[f64]) -> Result<f64, SolverError> {
        let y_kernel = self.solve_linear(rhs)?;
        let y_direct = oracle.solve(rhs)?;
        Ok(y_kernel.distance(&y_direct) / (1.0 + y_direct.norm()))
    }

    /// Indices of the lattice points lying in `[(ν+b)/4, 3(ν+b)/4]`, the
    /// middle-half window where positive solutions keep a fixed fraction of
    /// their sup norm.
    pub fn quarter_indices(&self) -> Option<(usize, usize)> {
        let nu = self.order.value();
        let lo = (nu + self.b as f64) / 4.0;
        let hi = 3.0 * (nu + self.b as f64) / 4.0;
        let mut first = None;
        let mut last = None;
        for i in 0..self.rows() {
            let t = self.grid.point(i);
            if t >= lo - LATTICE_TOL && t <= hi + LATTICE_TOL {
                if first.is_none() {
                    first = Some(i);
                }
                last = Some(i);
            }
        }
        Some((first?, last?))
    }

    /// The ratio γ ∈ (0,1): the worst-case fraction of a column's maximum
    /// that survives on the middle-half window.
    pub fn gamma_bound(&self) -> Result<f64, SolverError> {
        let (q_lo, q_hi) = self
            .quarter_indices()
            .ok_or_else(|| SolverError::DegenerateCone("middle-half window is empty".into()))?;
        let mut gamma_val = f64::INFINITY;
        for s in 0..self.cols() {
            let diag = self.entry(s + 1, s);
            if diag <= 1e-14 {
                continue;
            }
            let min_on_window = (q_lo..=q_hi)
                .map(|i| self.entry(i, s))
                .fold(f64::INFINITY, f64::min);
            gamma_val = gamma_val.min(min_on_window / diag);
        }
        if !gamma_val.is_finite() {
            return Err(SolverError::DegenerateCone(
                "no column has a positive maximum".into(),
            ));
        }
        Ok(gamma_val)
    }
}

/// The direct solver for `-Δᵛy(t) = rhs(t)` (t = 0..b) with zero boundary
/// values, posed as a dense linear system in the b+1 interior unknowns.
///
/// Each matrix column is the fractional difference of a unit grid function,
/// so this path is independent of the closed-form kernel it serves as an
/// oracle for. The factorization is reused across right-hand sides.
pub struct DenseOracle {
    grid: ShiftedGrid,
    lu: nalgebra::linalg::LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
}

impl DenseOracle {
    pub fn new(order: FracOrder, b: u32) -> Result<Self, SolverError> {
        let nu = order.value();
        let n = b as usize + 1;
        let grid = ShiftedGrid::new(nu - 2.0, b as usize + 3)?;
        let mut matrix = DMatrix::zeros(n, n);
        for j in 0..n {
            let mut unit = vec![0.0; grid.count()];
            unit[j + 1] = 1.0;
            let e = GridFunction::new(grid, unit)?;
            for r in 0..n {
                matrix[(r, j)] = -fractional_difference(&e, nu, r as f64)?;
            }
        }
        Ok(Self { grid, lu: matrix.lu() })
    }

    pub fn solve(&self, rhs: &[f64]) -> Result<GridFunction, SolverError> {
        let n = self.grid.count() - 2;
        if rhs.len() != n {
            return Err(SolverError::InvalidProblem(format!(
                "rhs has {} entries, expected {}",
                rhs.len(),
                n
            )));
        }
        let solution = self
            .lu
            .solve(&DVector::from_column_slice(rhs))
            .ok_or(SolverError::SingularSystem)?;
        let mut values = vec![0.0; self.grid.count()];
        for j in 0..n {
            values[j + 1] = solution[j];
        }
        Ok(GridFunction::new(self.grid, values)?)
    }
}

/// One-shot [`DenseOracle`] solve.
pub fn dense_solve(order: FracOrder, b: u32, rhs: &[f64]) -> Result<GridFunction, SolverError> {
    DenseOracle::new(order, b)?.solve(rhs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn build(nu: f64, b: u32) -> GreenMatrix {
        GreenMatrix::build(FracOrder::new(nu).unwrap(), b).unwrap()
    }

    #[test]
    fn boundary_rows_are_exactly_zero() {
        for &nu in &[1.1, 1.5, 2.0] {
            let g = build(nu, 4);
            for s in 0..g.cols() {
                assert_eq!(g.entry(0, s), 0.0);
                assert_eq!(g.entry(g.rows() - 1, s), 0.0);
            }
        }
    }

    #[test]
    fn integer_order_matches_classical_kernel() {
        // For ν = 2 the problem is -Δ²y = g on {0..b+2} with zero ends, and
        // the classical kernel is j(n-s-1)/n for j ≤ s+1, (s+1)(n-j)/n
        // otherwise, with n = b+2.
        let b = 3;
        let g = build(2.0, b);
        let n = (b + 2) as f64;
        for i in 0..g.rows() {
            for s in 0..g.cols() {
                let j = i as f64;
                let classical = if j <= s as f64 + 1.0 {
                    j * (n - s as f64 - 1.0) / n
                } else {
                    (s as f64 + 1.0) * (n - j) / n
                };
                assert!(
                    (g.entry(i, s) - classical).abs() <= 1e-10,
                    "({i},{s}): {} vs {classical}",
                    g.entry(i, s)
                );
            }
        }
    }

    #[test]
    fn zero_rhs_gives_zero_solution() {
        let g = build(1.25, 5);
        let y = g.solve_linear(&vec![0.0; g.cols()]).unwrap();
        assert_eq!(y.norm(), 0.0);
        assert_eq!(g.validate(&vec![0.0; g.cols()]).unwrap(), 0.0);
    }

    #[test]
    fn classical_case_agrees_with_dense_solve() {
        let g = build(2.0, 3);
        let discrepancy = g.validate(&[1.0, 1.0, 1.0, 1.0]).unwrap();
        assert!(discrepancy <= 1e-10, "discrepancy {discrepancy}");
    }

    #[test]
    fn fractional_case_agrees_with_dense_solve() {
        let g = build(1.25, 5);
        let rhs: Vec<f64> = (0..g.cols()).map(|s| 0.3 + 0.1 * s as f64).collect();
        let discrepancy = g.validate(&rhs).unwrap();
        assert!(discrepancy <= 1e-8, "discrepancy {discrepancy}");
    }

    #[test]
    fn column_maxima_sit_on_the_shifted_diagonal() {
        for &nu in &[1.25, 1.75] {
            let g = build(nu, 6);
            for s in 0..g.cols() {
                let mut argmax = 0;
                let mut best = f64::NEG_INFINITY;
                for i in 0..g.rows() {
                    if g.entry(i, s) > best + 1e-10 {
                        best = g.entry(i, s);
                        argmax = i;
                    }
                }
                assert_eq!(argmax, s + 1, "nu = {nu}, column {s}");
            }
        }
    }

    #[test]
    fn gamma_bound_is_a_contraction_factor() {
        let g = build(1.25, 5);
        let gamma_val = g.gamma_bound().unwrap();
        // reference value computed with 50-digit arithmetic
        assert!((gamma_val - 0.03173828125).abs() < 1e-12);
        let (lo, hi) = g.quarter_indices().unwrap();
        assert_eq!((lo, hi), (3, 5));
        for s in 0..g.cols() {
            let diag = g.entry(s + 1, s);
            for i in lo..=hi {
                assert!(g.entry(i, s) >= gamma_val * diag - 1e-12);
            }
        }
    }
}
