//! Discrete fractional calculus and positive solutions of fractional
//! difference boundary value problems.
//!
//! The crate works with the two-point problem
//!
//! ```text
//! -Δᵛy(t) = λ h(t+ν-1) f(t+ν-1, y(t+ν-1)),   t = 0..b,
//!  y(ν-2) = y(ν+b) = 0,                       1 < ν ≤ 2,
//! ```
//!
//! posed on the shifted lattice `{ν-2, ν-1, ..., ν+b}`. It provides
//!
//! * the underlying operators — generalized falling factorials, fractional
//!   sums, and fractional differences ([`frac`]);
//! * the Green's function of the linear problem, validated against an
//!   independent dense-solve oracle, together with the cone constants
//!   γ, η, σ that govern existence of positive solutions ([`green`],
//!   [`bvp`]);
//! * sampled checks of the growth hypotheses H1–H4 on the nonlinearity and
//!   of the fixed-point theorems they feed ([`conditions`]);
//! * damped Picard iteration and a line-searched Newton method that locate
//!   the positive solutions themselves, with residuals verified through the
//!   fractional-difference operator rather than the kernel that produced
//!   them ([`solver`]);
//! * a small expression language for supplying h and f as text ([`expr`])
//!   and a command-line front end (`fracbvp`).
//!
//! Start with the runnable examples (`cargo run --example
//! positive_solutions`) or the [`Bvp`] type.

pub mod bvp;
pub mod cli;
pub mod conditions;
pub mod config;
pub mod error;
pub mod expr;
pub mod frac;
mod gamma;
pub mod green;
pub mod grid;
pub mod solver;

pub use bvp::{Bvp, ConeConstants, Problem};
pub use conditions::ConditionReport;
pub use error::{ExprError, FracError, SolverError};
pub use expr::Expr;
pub use frac::{falling_factorial, forward_difference, fractional_difference, fractional_sum, FracOrder};
pub use green::{dense_solve, DenseOracle, GreenMatrix};
pub use grid::{GridFunction, ShiftedGrid};
pub use solver::{SearchOutcome, Solution, SolutionCheck, SolveMethod};
