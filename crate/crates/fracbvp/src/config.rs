//! JSON problem configuration shared by the command-line front end.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bvp::Problem;
use crate::error::SolverError;
use crate::expr::Expr;
use crate::frac::FracOrder;
use crate::solver::PicardOptions;

/// The configuration document. Expressions are strings in the crate's
/// expression language; `h` may use `t`, `f` may use `t` and `y`.
///
/// ```json
/// {
///   "nu": 1.25, "b": 5, "lambda": 0.02,
///   "h": "exp(t)", "f": "(1/100)*t*(y^0.5 + y^2)",
///   "solver": {"method": "picard", "tol": 1e-10, "max_iter": 500,
///              "damping": 1.0, "starts": [0.01, 0.1, 1, 10, 100]},
///   "sigma_unweighted": false
/// }
/// ```
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub nu: f64,
    pub b: u32,
    pub lambda: f64,
    pub h: String,
    pub f: String,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub sigma_unweighted: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Picard,
    Newton,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    pub method: Method,
    pub tol: f64,
    pub max_iter: u32,
    pub damping: f64,
    pub starts: Vec<f64>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            method: Method::Picard,
            tol: 1e-10,
            max_iter: 500,
            damping: 1.0,
            starts: vec![0.01, 0.1, 1.0, 10.0, 100.0],
        }
    }
}

impl ProblemConfig {
    pub fn from_path(path: &Path) -> Result<Self, String> {
        let text = fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self, String> {
        serde_json::from_str(text).map_err(|e| format!("invalid config: {e}"))
    }

    /// Validates the document and assembles the [`Problem`].
    pub fn build_problem(&self) -> Result<Problem, String> {
        let order = FracOrder::new(self.nu).map_err(|e| format!("field `nu`: {e}"))?;
        let h = Expr::parse(&self.h).map_err(|e| format!("field `h`: {e}"))?;
        let f = Expr::parse(&self.f).map_err(|e| format!("field `f`: {e}"))?;
        if !(self.solver.tol > 0.0) {
            return Err("field `solver.tol`: must be positive".into());
        }
        if self.solver.max_iter == 0 {
            return Err("field `solver.max_iter`: must be positive".into());
        }
        if !(self.solver.damping > 0.0 && self.solver.damping <= 1.0) {
            return Err("field `solver.damping`: must lie in (0, 1]".into());
        }
        if self.solver.starts.is_empty() || self.solver.starts.iter().any(|c| !(*c > 0.0)) {
            return Err("field `solver.starts`: must be a non-empty list of positive numbers".into());
        }
        Problem::new(order, self.b, self.lambda, &h, f).map_err(|e| match e {
            SolverError::InvalidProblem(msg) => format!("invalid problem: {msg}"),
            other => format!("invalid problem: {other}"),
        })
    }

    pub fn picard_options(&self) -> PicardOptions {
        PicardOptions {
            tol: self.solver.tol,
            max_iter: self.solver.max_iter,
            damping: self.solver.damping,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXAMPLE: &str = r#"{
        "nu": 1.25, "b": 5, "lambda": 0.02,
        "h": "exp(t)", "f": "(1/100)*t*(y^0.5 + y^2)"
    }"#;

    #[test]
    fn parses_with_defaults() {
        let config = ProblemConfig::from_json(EXAMPLE).unwrap();
        assert_eq!(config.solver.method, Method::Picard);
        assert_eq!(config.solver.max_iter, 500);
        assert!(!config.sigma_unweighted);
        config.build_problem().unwrap();
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let bad = r#"{"nu": 1.25, "b": 5, "lambda": 1.0, "h": "1", "f": "y", "typo": 1}"#;
        assert!(ProblemConfig::from_json(bad).is_err());
    }

    #[test]
    fn diagnostics_name_the_offending_field() {
        let bad_nu = r#"{"nu": 3.0, "b": 5, "lambda": 1.0, "h": "1", "f": "y"}"#;
        let err = ProblemConfig::from_json(bad_nu).unwrap().build_problem().unwrap_err();
        assert!(err.contains("`nu`"), "{err}");

        let bad_f = r#"{"nu": 1.5, "b": 5, "lambda": 1.0, "h": "1", "f": "2y"}"#;
        let err = ProblemConfig::from_json(bad_f).unwrap().build_problem().unwrap_err();
        assert!(err.contains("`f`"), "{err}");
    }
}
