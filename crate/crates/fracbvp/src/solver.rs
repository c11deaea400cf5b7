//! Fixed-point solvers: damped Picard iteration, a line-searched Newton
//! method on the interior residual, and the multi-start search for positive
//! solutions.
//!
//! Every returned [`Solution`] carries a residual computed by substituting
//! the candidate into the equation through the fractional-difference
//! operator — an independent path from the kernel the solvers iterate with.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::bvp::Bvp;
use crate::error::SolverError;
use crate::grid::GridFunction;

/// Norm at which Picard iteration is declared divergent.
const DIVERGENCE_LIMIT: f64 = 1e12;

/// Slack for the cone membership inequality `min y ≥ γ‖y‖`.
const CONE_SLACK: f64 = 1e-10;

/// Converged Newton outputs with components below this are reported as
/// negative solutions rather than clamped.
const NEGATIVE_SOLUTION_TOL: f64 = -1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SolveMethod {
    Picard,
    Newton,
}

/// A candidate solution with its verification data.
#[derive(Debug, Clone)]
pub struct Solution {
    pub y: GridFunction,
    /// `max_t |Δᵛy(t) + λ h f|` computed through the fractional-difference
    /// substitution, not the kernel.
    pub residual_norm: f64,
    pub iterations: u32,
    pub method: SolveMethod,
    pub in_cone: bool,
}

impl Solution {
    pub fn norm(&self) -> f64 {
        self.y.norm()
    }
}

/// Outcome of substituting a candidate into the equation.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SolutionCheck {
    pub residual_norm: f64,
    /// Both boundary values are exactly zero.
    pub bc_ok: bool,
    /// All values are nonnegative.
    pub positive: bool,
    /// `min over the middle-half window ≥ γ‖y‖` up to slack.
    pub in_cone: bool,
    /// `residual_norm ≤ tol` for the tolerance the check was asked about.
    pub within_tol: bool,
}

/// Options for the damped Picard iteration.
#[derive(Debug, Clone, Copy)]
pub struct PicardOptions {
    pub tol: f64,
    pub max_iter: u32,
    /// Damping θ ∈ (0,1]: y ← (1-θ)y + θ·clamp₊(Fy).
    pub damping: f64,
}

impl Default for PicardOptions {
    fn default() -> Self {
        Self { tol: 1e-10, max_iter: 500, damping: 1.0 }
    }
}

/// One failed start in the multi-start search.
#[derive(Debug, Clone, Serialize)]
pub struct StartFailure {
    pub start: f64,
    pub error: String,
}

/// Result of the multi-start search: deduplicated solutions sorted by norm,
/// plus the per-start failures (which are informational, not fatal).
#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub solutions: Vec<Solution>,
    pub failures: Vec<StartFailure>,
}

impl Bvp {
    /// Damped fixed-point iteration `y ← (1-θ)y + θ·clamp₊(Fy)`.
    ///
    /// Stops when the update satisfies `‖y_next - y‖ ≤ tol(1 + ‖y‖)`; the
    /// reported iteration count excludes the final confirming step, so a
    /// y-independent f converges in exactly one iteration. Norms beyond
    /// 1e12 are reported as divergence.
    pub fn solve_picard(
        &self,
        y0: &GridFunction,
        options: &PicardOptions,
    ) -> Result<Solution, SolverError> {
        if !(options.tol > 0.0) {
            return Err(SolverError::InvalidProblem("tolerance must be positive".into()));
        }
        if !(options.damping > 0.0 && options.damping <= 1.0) {
            return Err(SolverError::InvalidProblem(format!(
                "damping must lie in (0,1], got {}",
                options.damping
            )));
        }
        let theta = options.damping;
        let mut y = clamp_nonnegative(y0);
        let mut norm_tail: Vec<f64> = Vec::new();
        let mut productive_steps = 0u32;
        for _ in 0..options.max_iter {
            let fy = self.apply_operator(&y)?;
            let next_values: Vec<f64> = y
                .values()
                .iter()
                .zip(fy.values())
                .map(|(cur, f)| (1.0 - theta) * cur + theta * f.max(0.0))
                .collect();
            let next = GridFunction::new(*y.grid(), next_values)?;
            let step = next.distance(&y);
            let converged = step <= options.tol * (1.0 + y.norm());
            y = next;
            norm_tail.push(y.norm());
            if norm_tail.len() > 5 {
                norm_tail.remove(0);
            }
            if converged {
                let check = self.verify_solution(&y, options.tol)?;
                return Ok(Solution {
                    y,
                    residual_norm: check.residual_norm,
                    iterations: productive_steps,
                    method: SolveMethod::Picard,
                    in_cone: check.in_cone,
                });
            }
            productive_steps += 1;
            if y.norm() > DIVERGENCE_LIMIT {
                return Err(SolverError::Diverged(norm_tail));
            }
        }
        Err(SolverError::MaxIterations(options.max_iter))
    }

    /// Newton iteration on the interior residual `R(y) = y - Fy`, with a
    /// forward-difference Jacobian and halving line search (up to 30
    /// halvings). Trial points are clamped to ≥ 0 before f is evaluated,
    /// matching the cone the nonlinearity lives on; a converged iterate
    /// with components below -1e-8 is reported as [`SolverError::NegativeSolution`].
    pub fn solve_newton(
        &self,
        y0: &GridFunction,
        tol: f64,
        max_iter: u32,
    ) -> Result<Solution, SolverError> {
        if !(tol > 0.0) {
            return Err(SolverError::InvalidProblem("tolerance must be positive".into()));
        }
        let n = self.problem().b() as usize + 1;
        let grid = *self.green().grid();
        let mut y = clamp_nonnegative(y0);

        let residual = |y: &GridFunction| -> Result<DVector<f64>, SolverError> {
            let fy = self.apply_operator(y)?;
            Ok(DVector::from_iterator(
                n,
                (0..n).map(|j| y.value(j + 1) - fy.value(j + 1)),
            ))
        };

        let mut r = residual(&y)?;
        for iteration in 0..max_iter {
            let r_norm = r.amax();
            if r_norm <= tol {
                let min_value = y.values().iter().cloned().fold(f64::INFINITY, f64::min);
                if min_value < NEGATIVE_SOLUTION_TOL {
                    return Err(SolverError::NegativeSolution(min_value));
                }
                let y = snap_tiny_negatives(&y);
                let check = self.verify_solution(&y, tol)?;
                return Ok(Solution {
                    y,
                    residual_norm: check.residual_norm,
                    iterations: iteration,
                    method: SolveMethod::Newton,
                    in_cone: check.in_cone,
                });
            }

            // Forward-difference Jacobian of R on the interior unknowns,
            // dividing by the representable step so affine residuals give
            // the exact Jacobian.
            let mut jacobian = DMatrix::zeros(n, n);
            for j in 0..n {
                let base = y.value(j + 1);
                let stepped = base + 1e-6 * (1.0 + base.abs());
                let step = stepped - base;
                let mut values = y.values().to_vec();
                values[j + 1] = stepped;
                let perturbed = GridFunction::new(grid, values)?;
                let r_perturbed = residual(&perturbed)?;
                for i in 0..n {
                    jacobian[(i, j)] = (r_perturbed[i] - r[i]) / step;
                }
            }
            let direction = jacobian
                .lu()
                .solve(&(-&r))
                .ok_or(SolverError::SingularJacobian)?;

            // Halving line search on ‖R‖∞; failed trial evaluations count
            // as rejections rather than aborting the solve.
            let mut alpha = 1.0;
            let mut accepted = None;
            for _ in 0..30 {
                let mut values = y.values().to_vec();
                for j in 0..n {
                    values[j + 1] = (values[j + 1] + alpha * direction[j]).max(0.0);
                }
                let trial = GridFunction::new(grid, values)?;
                match residual(&trial) {
                    Ok(r_trial) if r_trial.amax() < r_norm => {
                        accepted = Some((trial, r_trial));
                        break;
                    }
                    _ => alpha *= 0.5,
                }
            }
            match accepted {
                Some((trial, r_trial)) => {
                    y = trial;
                    r = r_trial;
                }
                None => return Err(SolverError::LineSearchStalled),
            }
        }
        Err(SolverError::MaxIterations(max_iter))
    }

    /// Substitutes `y` into the equation and reports the residual
    /// `max_{t=0..b} |Δᵛy(t) + λ h(t+ν-1) f(t+ν-1, y(t+ν-1))|`, boundary
    /// exactness, nonnegativity, and cone membership. The residual goes
    /// through [`crate::frac::fractional_difference`], never the kernel.
    pub fn verify_solution(&self, y: &GridFunction, tol: f64) -> Result<SolutionCheck, SolverError> {
        let nu = self.problem().order().value();
        let b = self.problem().b() as usize;
        let lambda = self.problem().lambda();
        let mut residual: f64 = 0.0;
        for t in 0..=b {
            let diff = crate::frac::fractional_difference(y, nu, t as f64)?;
            let f_val = self.problem().f_at(t, y.value(t + 1))?;
            let total = diff + lambda * self.problem().h_values()[t] * f_val;
            residual = residual.max(total.abs());
        }
        let bc_ok = y.value(0) == 0.0 && y.value(y.grid().count() - 1) == 0.0;
        let positive = y.values().iter().all(|&v| v >= 0.0);
        let (q_lo, q_hi) = self.quarter();
        let min_on_window = (q_lo..=q_hi)
            .map(|i| y.value(i))
            .fold(f64::INFINITY, f64::min);
        let in_cone = positive && min_on_window >= self.gamma() * y.norm() - CONE_SLACK;
        Ok(SolutionCheck {
            residual_norm: residual,
            bc_ok,
            positive,
            in_cone,
            within_tol: residual <= tol,
        })
    }

    /// Runs the multi-start search: for each starting amplitude c (the zero
    /// start is added automatically), iterates Picard from the bump profile
    /// `c·G(t, ⌊b/2⌋)/max G(·, ⌊b/2⌋)`, polishes any Picard fixed point with
    /// Newton, and falls back to Newton directly from the bump when Picard
    /// fails. Accepted solutions are nonnegative, in the cone, and have
    /// residuals within 10× the tolerance; duplicates closer than
    /// `max(1e-6, 1e-4·norm)` in sup distance are merged.
    pub fn find_positive_solutions(
        &self,
        starts: &[f64],
        options: &PicardOptions,
    ) -> Result<SearchOutcome, SolverError> {
        if starts.is_empty() {
            return Err(SolverError::InvalidProblem("at least one start is required".into()));
        }
        if let Some(bad) = starts.iter().find(|c| !(**c > 0.0) || !c.is_finite()) {
            return Err(SolverError::InvalidProblem(format!(
                "starts must be positive and finite, got {bad}"
            )));
        }
        let mut all_starts = vec![0.0];
        all_starts.extend_from_slice(starts);
        all_starts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        all_starts.dedup();

        let mut solutions: Vec<Solution> = Vec::new();
        let mut failures = Vec::new();
        for &start in &all_starts {
            let y0 = self.bump_profile(start)?;
            match self.solve_from(&y0, options) {
                Ok(candidate) => {
                    if candidate.residual_norm <= 10.0 * options.tol
                        && candidate.in_cone
                        && candidate.y.values().iter().all(|&v| v >= 0.0)
                    {
                        merge_solution(&mut solutions, candidate);
                    } else {
                        failures.push(StartFailure {
                            start,
                            error: format!(
                                "candidate rejected: residual {:.3e}, in_cone {}",
                                candidate.residual_norm, candidate.in_cone
                            ),
                        });
                    }
                }
                Err(err) => failures.push(StartFailure { start, error: err.to_string() }),
            }
        }
        solutions.sort_by(|a, b| a.norm().partial_cmp(&b.norm()).unwrap());
        Ok(SearchOutcome { solutions, failures })
    }

    /// Picard, then Newton polish; Newton directly from the start when
    /// Picard fails to converge.
    fn solve_from(&self, y0: &GridFunction, options: &PicardOptions) -> Result<Solution, SolverError> {
        match self.solve_picard(y0, options) {
            Ok(picard) => match self.solve_newton(&picard.y, options.tol, options.max_iter) {
                Ok(polished) => Ok(polished),
                Err(_) => Ok(picard),
            },
            Err(_) => self.solve_newton(y0, options.tol, options.max_iter),
        }
    }

    /// The starting profile `c · G(t, ⌊b/2⌋) / max_t G(t, ⌊b/2⌋)`: a bump
    /// shaped like the kernel column at the middle of the lattice.
    pub fn bump_profile(&self, amplitude: f64) -> Result<GridFunction, SolverError> {
        let green = self.green();
        let column = (self.problem().b() / 2) as usize;
        let peak = (0..green.rows())
            .map(|i| green.entry(i, column))
            .fold(0.0f64, f64::max);
        let values = (0..green.rows())
            .map(|i| amplitude * green.entry(i, column) / peak)
            .collect();
        Ok(GridFunction::new(*green.grid(), values)?)
    }
}

fn clamp_nonnegative(y: &GridFunction) -> GridFunction {
    let values = y.values().iter().map(|v| v.max(0.0)).collect();
    GridFunction::new(*y.grid(), values).expect("clamping preserves validity")
}

/// Zeroes components in (-1e-8, 0): Newton roundoff, not sign structure.
fn snap_tiny_negatives(y: &GridFunction) -> GridFunction {
    let values = y
        .values()
        .iter()
        .map(|&v| if v < 0.0 && v > NEGATIVE_SOLUTION_TOL { 0.0 } else { v })
        .collect();
    GridFunction::new(*y.grid(), values).expect("snapping preserves validity")
}

/// Keeps at most one of any pair of solutions within the dedup tolerance,
/// preferring the smaller residual.
fn merge_solution(solutions: &mut Vec<Solution>, candidate: Solution) {
    for existing in solutions.iter_mut() {
        let scale = existing.norm().max(candidate.norm());
        let tol = (1e-4 * scale).max(1e-6);
        if existing.y.distance(&candidate.y) <= tol {
            if candidate.residual_norm < existing.residual_norm {
                *existing = candidate;
            }
            return;
        }
    }
    solutions.push(candidate);
}
