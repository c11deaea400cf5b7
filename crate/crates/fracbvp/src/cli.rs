//! Implementations of the `fracbvp` subcommands.
//!
//! Each command returns a process exit code: 0 on success, 2 for
//! configuration or parse errors, 3 when kernel validation fails, 4 for a
//! degenerate cone, 5 when no start converges. All output is deterministic:
//! the same configuration and flags produce byte-identical bytes.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde_json::json;

use crate::bvp::Bvp;
use crate::config::{Method, ProblemConfig};
use crate::error::SolverError;
use crate::solver::{SearchOutcome, Solution};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_VALIDATION: i32 = 3;
pub const EXIT_DEGENERATE_CONE: i32 = 4;
pub const EXIT_NO_SOLUTION: i32 = 5;

/// Full-precision decimal form (17 significant digits).
fn full(v: f64) -> String {
    format!("{v:.16e}")
}

fn fail(code: i32, message: &str) -> i32 {
    eprintln!("error: {message}");
    code
}

fn exit_code_for(err: &SolverError) -> i32 {
    match err {
        SolverError::Validation { .. } => EXIT_VALIDATION,
        SolverError::DegenerateCone(_) => EXIT_DEGENERATE_CONE,
        _ => EXIT_CONFIG,
    }
}

fn load(config_path: &Path) -> Result<(ProblemConfig, Bvp), (i32, String)> {
    let config = ProblemConfig::from_path(config_path).map_err(|e| (EXIT_CONFIG, e))?;
    let problem = config.build_problem().map_err(|e| (EXIT_CONFIG, e))?;
    let bvp = Bvp::new(problem).map_err(|e| (exit_code_for(&e), e.to_string()))?;
    Ok((config, bvp))
}

fn write_output(path: Option<&Path>, contents: &str) -> Result<(), String> {
    match path {
        Some(p) => fs::write(p, contents).map_err(|e| format!("cannot write {}: {e}", p.display())),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

/// `fracbvp green`: emits the kernel table as CSV `t,s,G`.
pub fn cmd_green(config_path: &Path, out: Option<&Path>) -> i32 {
    let (_, bvp) = match load(config_path) {
        Ok(v) => v,
        Err((code, msg)) => return fail(code, &msg),
    };
    let green = bvp.green();
    let mut csv = String::from("t,s,G\n");
    for i in 0..green.rows() {
        let t = green.grid().point(i);
        for s in 0..green.cols() {
            let _ = writeln!(csv, "{t},{s},{}", full(green.entry(i, s)));
        }
    }
    if let Err(msg) = write_output(out, &csv) {
        return fail(EXIT_CONFIG, &msg);
    }
    EXIT_OK
}

/// `fracbvp constants`: prints γ, η, σ, the middle-half window, and t*.
pub fn cmd_constants(config_path: &Path, as_json: bool, sigma_unweighted_flag: bool) -> i32 {
    let (config, bvp) = match load(config_path) {
        Ok(v) => v,
        Err((code, msg)) => return fail(code, &msg),
    };
    let unweighted = config.sigma_unweighted || sigma_unweighted_flag;
    let cone = match bvp.cone_constants(unweighted) {
        Ok(c) => c,
        Err(e) => return fail(exit_code_for(&e), &e.to_string()),
    };
    let grid = bvp.green().grid();
    let window: Vec<f64> = (cone.quarter_lo..=cone.quarter_hi).map(|i| grid.point(i)).collect();
    if as_json {
        let doc = json!({
            "gamma": cone.gamma,
            "eta": cone.eta,
            "sigma": cone.sigma,
            "sigma_unweighted": cone.sigma_unweighted,
            "quarter_window": window,
            "midpoint": grid.point(cone.midpoint_index),
        });
        println!("{doc}");
    } else {
        println!("gamma = {}", full(cone.gamma));
        println!("eta   = {}", full(cone.eta));
        println!(
            "sigma = {}{}",
            full(cone.sigma),
            if cone.sigma_unweighted { "  (unweighted)" } else { "" }
        );
        let points = window.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(", ");
        println!("middle-half window: [{points}]");
        println!("midpoint t* = {}", grid.point(cone.midpoint_index));
    }
    EXIT_OK
}

/// `fracbvp check`: prints the hypothesis report. Exit code is 0 whether or
/// not the hypotheses hold — the report is the output.
pub fn cmd_check(config_path: &Path, radii: &[f64], samples: usize, as_json: bool) -> i32 {
    let (config, bvp) = match load(config_path) {
        Ok(v) => v,
        Err((code, msg)) => return fail(code, &msg),
    };
    if radii.is_empty() || radii.iter().any(|r| !(*r > 0.0)) {
        return fail(EXIT_CONFIG, "radii must be a non-empty list of positive numbers");
    }
    let report = match bvp.check_conditions(radii, samples, config.sigma_unweighted) {
        Ok(r) => r,
        Err(e) => return fail(exit_code_for(&e), &e.to_string()),
    };
    if as_json {
        match serde_json::to_string(&report) {
            Ok(doc) => println!("{doc}"),
            Err(e) => return fail(EXIT_CONFIG, &format!("cannot serialize report: {e}")),
        }
        return EXIT_OK;
    }
    println!(
        "H1 (f ≤ ηr/λ on [0,r]):      {}{}",
        verdict(report.h1.holds),
        match report.h1.radius {
            Some(r) if report.h1.tight => format!(" at r = {r} (tight)"),
            Some(r) => format!(" at r = {r}"),
            None => format!(" (best ratio {:.4})", report.h1.max_f_over_threshold),
        }
    );
    println!(
        "H2 (f ≥ σr/λ on [γr,r]):     {}{}",
        verdict(report.h2.holds),
        match report.h2.radius {
            Some(r) => format!(" at r = {r}"),
            None => format!(" (best ratio {:.4})", report.h2.min_f_over_threshold),
        }
    );
    println!(
        "H3 (f/y → ∞ as y → 0⁺):      {} [heuristic; extreme ratio {:.4} vs σ/λ = {:.4}]",
        verdict(report.h3.heuristic_holds),
        report.h3.samples.last().map(|s| s.ratio).unwrap_or(f64::NAN),
        report.h3.threshold
    );
    println!(
        "H4 (f/y → ∞ as y → ∞):       {} [heuristic; extreme ratio {:.4} vs σ/λ = {:.4}]",
        verdict(report.h4.heuristic_holds),
        report.h4.samples.last().map(|s| s.ratio).unwrap_or(f64::NAN),
        report.h4.threshold
    );
    match report.one_solution_radii {
        Some((r1, r2)) => println!(
            "one positive solution (H1 ∧ H2): applicable, norm within [{r1}, {r2}]"
        ),
        None => println!("one positive solution (H1 ∧ H2): not established on this radius grid"),
    }
    println!(
        "two positive solutions (H1 ∧ H3): {}{}",
        verdict(report.two_solutions_h1_h3),
        report
            .m
            .filter(|_| report.two_solutions_h1_h3)
            .map(|m| format!(", norms straddle m = {m}"))
            .unwrap_or_default()
    );
    println!(
        "two positive solutions (H2 ∧ H4, f > 0): {}",
        verdict(report.two_solutions_h2_h4)
    );
    EXIT_OK
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "holds"
    } else {
        "does not hold"
    }
}

/// `fracbvp solve`: runs the multi-start search, prints one line per
/// solution, and (with `--out base.csv`) writes each solution as
/// `base_1.csv`, `base_2.csv`, ... with columns `t,y`.
pub fn cmd_solve(config_path: &Path, out: Option<&Path>) -> i32 {
    let (config, bvp) = match load(config_path) {
        Ok(v) => v,
        Err((code, msg)) => return fail(code, &msg),
    };
    let outcome = match run_search(&bvp, &config) {
        Ok(o) => o,
        Err(e) => return fail(exit_code_for(&e), &e.to_string()),
    };
    for failure in &outcome.failures {
        eprintln!("start {}: {}", failure.start, failure.error);
    }
    if outcome.solutions.is_empty() {
        return fail(EXIT_NO_SOLUTION, "no start converged to a positive solution");
    }
    for (k, solution) in outcome.solutions.iter().enumerate() {
        println!(
            "solution {}: norm = {}, residual = {}, iterations = {}, method = {}, in_cone = {}",
            k + 1,
            full(solution.norm()),
            full(solution.residual_norm),
            solution.iterations,
            match solution.method {
                crate::solver::SolveMethod::Picard => "picard",
                crate::solver::SolveMethod::Newton => "newton",
            },
            solution.in_cone
        );
        if let Some(base) = out {
            let path = suffixed_path(base, k + 1);
            if let Err(msg) = write_output(Some(&path), &solution_csv(solution)) {
                return fail(EXIT_CONFIG, &msg);
            }
        }
    }
    EXIT_OK
}

/// Runs the configured search strategy.
pub fn run_search(bvp: &Bvp, config: &ProblemConfig) -> Result<SearchOutcome, SolverError> {
    let options = config.picard_options();
    match config.solver.method {
        Method::Picard => bvp.find_positive_solutions(&config.solver.starts, &options),
        Method::Newton => {
            // Newton-only variant of the multi-start search.
            let mut solutions: Vec<Solution> = Vec::new();
            let mut failures = Vec::new();
            let mut starts = vec![0.0];
            starts.extend_from_slice(&config.solver.starts);
            starts.sort_by(|a, b| a.partial_cmp(b).unwrap());
            starts.dedup();
            for &start in &starts {
                let y0 = bvp.bump_profile(start)?;
                match bvp.solve_newton(&y0, options.tol, options.max_iter) {
                    Ok(candidate)
                        if candidate.residual_norm <= 10.0 * options.tol && candidate.in_cone =>
                    {
                        if !solutions.iter().any(|s| {
                            let scale = s.norm().max(candidate.norm());
                            s.y.distance(&candidate.y) <= (1e-4 * scale).max(1e-6)
                        }) {
                            solutions.push(candidate);
                        }
                    }
                    Ok(candidate) => failures.push(crate::solver::StartFailure {
                        start,
                        error: format!("candidate rejected: residual {:.3e}", candidate.residual_norm),
                    }),
                    Err(e) => {
                        failures.push(crate::solver::StartFailure { start, error: e.to_string() })
                    }
                }
            }
            solutions.sort_by(|a, b| a.norm().partial_cmp(&b.norm()).unwrap());
            Ok(SearchOutcome { solutions, failures })
        }
    }
}

fn solution_csv(solution: &Solution) -> String {
    let mut csv = String::from("t,y\n");
    let grid = solution.y.grid();
    for i in 0..grid.count() {
        let _ = writeln!(csv, "{},{}", grid.point(i), full(solution.y.value(i)));
    }
    csv
}

fn suffixed_path(base: &Path, index: usize) -> PathBuf {
    let stem = base.file_stem().and_then(|s| s.to_str()).unwrap_or("solution");
    let name = match base.extension().and_then(|e| e.to_str()) {
        Some(ext) => format!("{stem}_{index}.{ext}"),
        None => format!("{stem}_{index}"),
    };
    base.with_file_name(name)
}

/// `fracbvp sweep`: solves over a geometric λ grid and emits CSV
/// `lambda,num_solutions,norm_1,norm_2,...`.
pub fn cmd_sweep(
    config_path: &Path,
    lambda_from: f64,
    lambda_to: f64,
    steps: u32,
    out: Option<&Path>,
) -> i32 {
    let (config, bvp) = match load(config_path) {
        Ok(v) => v,
        Err((code, msg)) => return fail(code, &msg),
    };
    if !(lambda_from > 0.0) || !(lambda_to > lambda_from) || steps < 2 {
        return fail(
            EXIT_CONFIG,
            "sweep needs 0 < lambda-from < lambda-to and at least 2 steps",
        );
    }
    let ratio = (lambda_to / lambda_from).powf(1.0 / (steps - 1) as f64);
    let mut rows = Vec::with_capacity(steps as usize);
    let mut max_solutions = 0usize;
    for k in 0..steps {
        let lambda = lambda_from * ratio.powi(k as i32);
        let problem = match bvp.problem().with_lambda(lambda) {
            Ok(p) => p,
            Err(e) => return fail(EXIT_CONFIG, &e.to_string()),
        };
        let point = match Bvp::new(problem) {
            Ok(b) => b,
            Err(e) => return fail(exit_code_for(&e), &e.to_string()),
        };
        let norms: Vec<f64> = match run_search(&point, &config) {
            Ok(outcome) => outcome.solutions.iter().map(|s| s.norm()).collect(),
            Err(e) => return fail(exit_code_for(&e), &e.to_string()),
        };
        max_solutions = max_solutions.max(norms.len());
        rows.push((lambda, norms));
    }
    let mut csv = String::from("lambda,num_solutions");
    for k in 1..=max_solutions {
        let _ = write!(csv, ",norm_{k}");
    }
    csv.push('\n');
    for (lambda, norms) in &rows {
        let _ = write!(csv, "{},{}", full(*lambda), norms.len());
        for k in 0..max_solutions {
            match norms.get(k) {
                Some(n) => {
                    let _ = write!(csv, ",{}", full(*n));
                }
                None => csv.push(','),
            }
        }
        csv.push('\n');
    }
    if let Err(msg) = write_output(out, &csv) {
        return fail(EXIT_CONFIG, &msg);
    }
    EXIT_OK
}
