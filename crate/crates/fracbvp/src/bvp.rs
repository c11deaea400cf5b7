//! Problem definition, the fixed-point operator, and the cone constants.

use serde::Serialize;

use crate::error::SolverError;
use crate::expr::{Expr, Var};
use crate::frac::FracOrder;
use crate::green::GreenMatrix;
use crate::grid::GridFunction;

/// The data of the boundary value problem: order ν, lattice length b,
/// parameter λ > 0, nonnegative weight h, and nonlinearity f(t, y).
#[derive(Debug, Clone)]
pub struct Problem {
    order: FracOrder,
    b: u32,
    lambda: f64,
    /// h evaluated at the points s+ν-1, s = 0..b.
    h_values: Vec<f64>,
    f: Expr,
}

impl Problem {
    /// Builds a problem with h given as an expression in t.
    pub fn new(order: FracOrder, b: u32, lambda: f64, h: &Expr, f: Expr) -> Result<Self, SolverError> {
        if h.uses(Var::Y) {
            return Err(SolverError::InvalidProblem(
                "the weight h may only depend on t".into(),
            ));
        }
        let nu = order.value();
        let h_values = (0..=b)
            .map(|s| h.eval(nu - 1.0 + s as f64, 0.0))
            .collect::<Result<Vec<_>, _>>()?;
        Self::with_h_values(order, b, lambda, h_values, f)
    }

    /// Builds a problem with h supplied as tabulated values at s+ν-1,
    /// s = 0..b.
    pub fn with_h_values(
        order: FracOrder,
        b: u32,
        lambda: f64,
        h_values: Vec<f64>,
        f: Expr,
    ) -> Result<Self, SolverError> {
        if b < 1 {
            return Err(SolverError::InvalidProblem("b must be at least 1".into()));
        }
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(SolverError::InvalidProblem(format!(
                "λ must be positive and finite, got {lambda}"
            )));
        }
        if h_values.len() != b as usize + 1 {
            return Err(SolverError::InvalidProblem(format!(
                "h must supply {} values, got {}",
                b + 1,
                h_values.len()
            )));
        }
        if let Some(bad) = h_values.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(SolverError::InvalidProblem(format!(
                "h must be nonnegative and finite, found {bad}"
            )));
        }
        Ok(Self { order, b, lambda, h_values, f })
    }

    pub fn order(&self) -> FracOrder {
        self.order
    }

    pub fn b(&self) -> u32 {
        self.b
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Same problem with a different λ; used by parameter sweeps.
    pub fn with_lambda(&self, lambda: f64) -> Result<Self, SolverError> {
        Self::with_h_values(self.order, self.b, lambda, self.h_values.clone(), self.f.clone())
    }

    pub fn h_values(&self) -> &[f64] {
        &self.h_values
    }

    pub fn nonlinearity(&self) -> &Expr {
        &self.f
    }

    /// f evaluated at the s-th interior point, t = s+ν-1.
    pub fn f_at(&self, s: usize, y: f64) -> Result<f64, SolverError> {
        let t = self.order.value() - 1.0 + s as f64;
        Ok(self.f.eval(t, y)?)
    }
}

/// The constants that scale the growth hypotheses on f.
///
/// * `gamma` — worst-case fraction of a column maximum of G retained on the
///   middle-half window; lies in (0,1).
/// * `eta` — reciprocal of the h-weighted sum of the column maxima
///   `Σ_s G(s+ν-1, s) h(s+ν-1)`.
/// * `sigma` — reciprocal of `γ · Σ_{s=s_lo}^{s_hi} G(t*, s) h(s+ν-1)` over
///   the middle-half column window, with t* the midpoint `⌊(b-ν)/2⌋+ν`.
///   With `sigma_unweighted`, the h factor is dropped from the sum.
#[derive(Debug, Clone, Serialize)]
pub struct ConeConstants {
    pub gamma: f64,
    pub eta: f64,
    pub sigma: f64,
    pub sigma_unweighted: bool,
    /// Grid index range of the middle-half window `[(ν+b)/4, 3(ν+b)/4]`.
    pub quarter_lo: usize,
    pub quarter_hi: usize,
    /// Grid index of t* = ⌊(b-ν)/2⌋ + ν.
    pub midpoint_index: usize,
}

/// An assembled boundary value problem: the problem data plus its validated
/// Green's function and cone geometry.
#[derive(Debug, Clone)]
pub struct Bvp {
    problem: Problem,
    green: GreenMatrix,
    gamma: f64,
    quarter: (usize, usize),
}

impl Bvp {
    pub fn new(problem: Problem) -> Result<Self, SolverError> {
        let green = GreenMatrix::build(problem.order(), problem.b())?;
        let gamma = green.gamma_bound()?;
        let quarter = green
            .quarter_indices()
            .ok_or_else(|| SolverError::DegenerateCone("middle-half window is empty".into()))?;
        Ok(Self { problem, green, gamma, quarter })
    }

    pub fn problem(&self) -> &Problem {
        &self.problem
    }

    pub fn green(&self) -> &GreenMatrix {
        &self.green
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn quarter(&self) -> (usize, usize) {
        self.quarter
    }

    /// Computes γ, η, and σ. Fails with a degenerate-cone error when the
    /// midpoint t* falls outside the middle-half window (which happens for
    /// very short lattices) or when a defining sum vanishes.
    pub fn cone_constants(&self, sigma_unweighted: bool) -> Result<ConeConstants, SolverError> {
        let nu = self.problem.order().value();
        let b = self.problem.b();
        let green = &self.green;

        let eta_denom: f64 = (0..=b as usize)
            .map(|s| green.entry(s + 1, s) * self.problem.h_values()[s])
            .sum();
        if eta_denom <= 0.0 {
            return Err(SolverError::DegenerateCone(
                "Σ G(s+ν-1, s) h(s+ν-1) is not positive".into(),
            ));
        }
        let eta = 1.0 / eta_denom;

        // Midpoint t* = ⌊(b-ν)/2⌋ + ν, as a grid index.
        let midpoint_index = ((b as f64 - nu) / 2.0).floor() as i64 + 2;
        let (q_lo, q_hi) = self.quarter;
        if midpoint_index < q_lo as i64 || midpoint_index > q_hi as i64 {
            return Err(SolverError::DegenerateCone(format!(
                "midpoint t* (index {midpoint_index}) falls outside the middle-half window [{q_lo}, {q_hi}]"
            )));
        }
        let midpoint_index = midpoint_index as usize;

        // Column window [⌊(b+ν)/4-ν+1⌋, ⌊3(b+ν)/4-ν+1⌋], clipped to 0..=b.
        let s_lo = (((b as f64 + nu) / 4.0 - nu + 1.0).floor() as i64).max(0) as usize;
        let s_hi = ((3.0 * (b as f64 + nu) / 4.0 - nu + 1.0).floor() as i64).min(b as i64);
        if (s_hi as i64) < s_lo as i64 {
            return Err(SolverError::DegenerateCone(
                "middle-half column window is empty".into(),
            ));
        }
        let s_hi = s_hi as usize;
        let sigma_denom: f64 = (s_lo..=s_hi)
            .map(|s| {
                let weight = if sigma_unweighted { 1.0 } else { self.problem.h_values()[s] };
                green.entry(midpoint_index, s) * weight
            })
            .sum();
        if sigma_denom <= 0.0 {
            return Err(SolverError::DegenerateCone(
                "σ denominator is not positive".into(),
            ));
        }
        let sigma = 1.0 / (self.gamma * sigma_denom);

        Ok(ConeConstants {
            gamma: self.gamma,
            eta,
            sigma,
            sigma_unweighted,
            quarter_lo: q_lo,
            quarter_hi: q_hi,
            midpoint_index,
        })
    }

    /// Applies the fixed-point operator:
    /// `(Fy)(t) = λ Σ_s G(t,s) h(s+ν-1) f(s+ν-1, y(s+ν-1))`.
    ///
    /// Boundary values of the result are exactly zero. Evaluation errors
    /// from f propagate; callers working on the cone clamp y to ≥ 0 first.
    pub fn apply_operator(&self, y: &GridFunction) -> Result<GridFunction, SolverError> {
        let rhs = self.weighted_rhs(y)?;
        self.green.solve_linear(&rhs)
    }

    /// `λ h(s+ν-1) f(s+ν-1, y(s+ν-1))` for s = 0..b.
    pub(crate) fn weighted_rhs(&self, y: &GridFunction) -> Result<Vec<f64>, SolverError> {
        let lambda = self.problem.lambda();
        (0..=self.problem.b() as usize)
            .map(|s| {
                let f_val = self.problem.f_at(s, y.value(s + 1))?;
                Ok(lambda * self.problem.h_values()[s] * f_val)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::ShiftedGrid;

    fn example_problem(lambda: f64) -> Problem {
        let order = FracOrder::new(1.25).unwrap();
        let h = Expr::parse("exp(t)").unwrap();
        let f = Expr::parse("(1/100)*t*(y^0.5 + y^2)").unwrap();
        Problem::new(order, 5, lambda, &h, f).unwrap()
    }

    #[test]
    fn rejects_bad_problem_data() {
        let order = FracOrder::new(1.25).unwrap();
        let f = Expr::parse("y").unwrap();
        let h_with_y = Expr::parse("y+1").unwrap();
        assert!(Problem::new(order, 5, 1.0, &h_with_y, f.clone()).is_err());
        let h = Expr::parse("t").unwrap();
        // h(ν-1) = 0.25 > 0 but h(t) = t is negative nowhere on the lattice;
        // use -1 to trigger the nonnegativity check
        let h_neg = Expr::parse("0-1").unwrap();
        assert!(Problem::new(order, 5, 1.0, &h_neg, f.clone()).is_err());
        assert!(Problem::new(order, 5, 0.0, &h, f.clone()).is_err());
        assert!(Problem::new(order, 5, -2.0, &h, f).is_err());
    }

    #[test]
    fn cone_constants_for_the_exponential_weight() {
        let bvp = Bvp::new(example_problem(1.0)).unwrap();
        let cone = bvp.cone_constants(false).unwrap();
        // reference values computed with 50-digit arithmetic
        assert!((cone.gamma - 0.03173828125).abs() < 1e-12);
        assert!((cone.eta - 0.003215690998084089).abs() < 1e-12);
        assert!((cone.sigma - 0.2841270998518794).abs() < 1e-10);
        assert!(cone.eta > 0.0021);
        assert!(cone.gamma > 0.0 && cone.gamma < 1.0);
        assert_eq!((cone.quarter_lo, cone.quarter_hi), (3, 5));
        assert_eq!(cone.midpoint_index, 3);
        let unweighted = bvp.cone_constants(true).unwrap();
        assert!((unweighted.sigma - 8.738329150233058).abs() < 1e-9);
    }

    #[test]
    fn integer_order_diagonal_sum() {
        // ν = 2, b = 7, h ≡ 1: η = 1/Σ_s G(s+1, s) with the classical
        // diagonal (s+1)(8-s)/9, so Σ = 120/9 and η = 0.075.
        let order = FracOrder::new(2.0).unwrap();
        let h = Expr::parse("1").unwrap();
        let f = Expr::parse("y").unwrap();
        let bvp = Bvp::new(Problem::new(order, 7, 1.0, &h, f).unwrap()).unwrap();
        let cone = bvp.cone_constants(false).unwrap();
        assert!((cone.eta - 0.075).abs() < 1e-12);
    }

    #[test]
    fn operator_vanishes_with_zero_nonlinearity() {
        let order = FracOrder::new(1.5).unwrap();
        let h = Expr::parse("1").unwrap();
        let f = Expr::parse("0").unwrap();
        let bvp = Bvp::new(Problem::new(order, 4, 1.0, &h, f).unwrap()).unwrap();
        let grid = *bvp.green().grid();
        let y = GridFunction::constant(grid, 2.0).unwrap();
        let fy = bvp.apply_operator(&y).unwrap();
        assert_eq!(fy.norm(), 0.0);
    }

    #[test]
    fn operator_matches_linear_solve_for_y_independent_f() {
        // When f = g(t) does not depend on y, Fy is the linear solution with
        // rhs = λ h g.
        let order = FracOrder::new(1.25).unwrap();
        let h = Expr::parse("exp(t)").unwrap();
        let f = Expr::parse("t+1").unwrap();
        let lambda = 0.7;
        let problem = Problem::new(order, 5, lambda, &h, f).unwrap();
        let bvp = Bvp::new(problem).unwrap();
        let grid = *bvp.green().grid();
        let y = GridFunction::constant(grid, 123.0).unwrap();
        let fy = bvp.apply_operator(&y).unwrap();
        let rhs: Vec<f64> = (0..=5usize)
            .map(|s| {
                let t = 0.25 + s as f64;
                lambda * t.exp() * (t + 1.0)
            })
            .collect();
        let direct = bvp.green().solve_linear(&rhs).unwrap();
        assert!(fy.distance(&direct) < 1e-12);
        // boundary values are exactly zero
        assert_eq!(fy.value(0), 0.0);
        assert_eq!(fy.value(grid.count() - 1), 0.0);
    }

    #[test]
    fn short_lattice_midpoint_degenerates() {
        // For b = 1 with fractional ν the midpoint ⌊(b-ν)/2⌋+ν = ν-1 sits
        // below the middle-half window.
        let order = FracOrder::new(1.5).unwrap();
        let h = Expr::parse("1").unwrap();
        let f = Expr::parse("y").unwrap();
        let bvp = Bvp::new(Problem::new(order, 1, 1.0, &h, f).unwrap()).unwrap();
        assert!(matches!(
            bvp.cone_constants(false),
            Err(SolverError::DegenerateCone(_))
        ));
    }

    #[test]
    fn grid_shape_matches_problem() {
        let bvp = Bvp::new(example_problem(0.01)).unwrap();
        let grid = bvp.green().grid();
        assert_eq!(grid.count(), 8);
        assert!((grid.point(0) - (-0.75)).abs() < 1e-15);
        assert!((grid.point(7) - 6.25).abs() < 1e-15);
        let _ = ShiftedGrid::new(-0.75, 8).unwrap();
    }
}
