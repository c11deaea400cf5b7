//! Error types for the fractional operators, the expression language, and
//! the boundary value problem machinery.

use thiserror::Error;

/// Errors from the discrete fractional calculus operators.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum FracError {
    /// Γ(t+1) has a pole while Γ(t+1-ν) does not; the falling factorial is
    /// undefined there and the zero convention does not apply.
    #[error("falling factorial undefined: Γ({0}+1) has a pole but the denominator does not")]
    PoleNumerator(f64),
    /// An argument is off the required lattice or the operand does not cover
    /// the points the operator needs.
    #[error("domain error: {0}")]
    Domain(String),
}

/// Errors from parsing or evaluating expressions.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum ExprError {
    #[error("syntax error at column {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("unknown identifier `{name}` at column {position}")]
    UnknownIdentifier { position: usize, name: String },
    #[error("evaluation error: {reason}")]
    Eval { reason: String },
}

/// Errors from Green's function construction, cone constants, and solvers.
#[derive(Debug, Error)]
pub enum SolverError {
    #[error(transparent)]
    Frac(#[from] FracError),
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
    /// The tabulated kernel disagrees with the direct linear-system oracle;
    /// this signals a formula or indexing bug, not a user error.
    #[error("kernel validation failed: discrepancy {discrepancy:.3e} exceeds {tolerance:.1e}")]
    Validation { discrepancy: f64, tolerance: f64 },
    #[error("direct linear system is singular")]
    SingularSystem,
    #[error("degenerate cone: {0}")]
    DegenerateCone(String),
    #[error("iteration diverged; trailing norms {0:?}")]
    Diverged(Vec<f64>),
    #[error("no convergence within {0} iterations")]
    MaxIterations(u32),
    #[error("Jacobian is singular")]
    SingularJacobian,
    /// Converged to a root with negative components; reported rather than
    /// silently discarded.
    #[error("converged solution is not nonnegative (min value {0:.3e})")]
    NegativeSolution(f64),
    #[error("line search failed to reduce the residual")]
    LineSearchStalled,
}
