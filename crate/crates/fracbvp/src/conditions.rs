//! Sampled checks of the growth hypotheses on the nonlinearity.
//!
//! The four hypotheses compare f against thresholds built from the cone
//! constants:
//!
//! * H1 at radius r: `f(t,y) ≤ ηr/λ` for all `0 ≤ y ≤ r`;
//! * H2 at radius r: `f(t,y) ≥ σr/λ` for all `γr ≤ y ≤ r`;
//! * H3: `f(t,y)/y → ∞` as `y → 0⁺` (uniformly in t);
//! * H4: `f(t,y)/y → ∞` as `y → ∞`.
//!
//! H1 and H2 quantify over continuous y-intervals and H3/H4 are limits, so
//! none of them can be *proven* by evaluation. The checks here sample
//! (uniform grids for H1/H2, log-spaced points for H3/H4) and report
//! worst-case witnesses; H3/H4 results are flagged as heuristic.

use serde::Serialize;

use crate::bvp::{Bvp, ConeConstants};
use crate::error::SolverError;

/// Sampled f/σ-threshold evidence at one radius.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RadiusSample {
    pub r: f64,
    /// Worst ratio of f against the hypothesis threshold at this radius;
    /// values ≤ 1 mean the hypothesis held on the samples.
    pub ratio: f64,
}

/// Outcome of the H1 sup-bound scan.
#[derive(Debug, Clone, Serialize)]
pub struct SupBoundCheck {
    pub holds: bool,
    /// Smallest radius from the grid at which H1 held.
    pub radius: Option<f64>,
    /// `max λf/(ηr)` at that radius (or the best seen when none held).
    pub max_f_over_threshold: f64,
    /// Equality case: the bound is attained within 1e-9.
    pub tight: bool,
    pub per_radius: Vec<RadiusSample>,
}

/// Outcome of the H2 inf-bound scan.
#[derive(Debug, Clone, Serialize)]
pub struct InfBoundCheck {
    pub holds: bool,
    /// Largest radius from the grid at which H2 held.
    pub radius: Option<f64>,
    /// `min λf/(σr)` at that radius (or the best seen); ≥ 1 means held.
    pub min_f_over_threshold: f64,
    pub per_radius: Vec<RadiusSample>,
}

/// One sampled point of the ratio f(t,y)/y minimized over t.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RatioSample {
    pub y: f64,
    pub ratio: f64,
}

/// Heuristic verdict on a divergence hypothesis (H3 or H4).
#[derive(Debug, Clone, Serialize)]
pub struct LimitCheck {
    pub heuristic_holds: bool,
    /// The comparison level σ/λ the extreme sample must exceed.
    pub threshold: f64,
    /// Ratio samples ordered toward the limit (y → 0⁺ or y → ∞).
    pub samples: Vec<RatioSample>,
}

/// Applicability of the existence theorems, as far as sampling can tell.
#[derive(Debug, Clone, Serialize)]
pub struct ConditionReport {
    pub h1: SupBoundCheck,
    pub h2: InfBoundCheck,
    pub h3: LimitCheck,
    pub h4: LimitCheck,
    /// H1 at r₁ and H2 at r₂ with r₁ < r₂ guarantee one positive solution
    /// with norm in [r₁, r₂].
    pub one_solution_applicable: bool,
    pub one_solution_radii: Option<(f64, f64)>,
    /// H1 together with H3 (heuristically) guarantees two positive
    /// solutions straddling m, the H1 radius.
    pub two_solutions_h1_h3: bool,
    /// H2 together with H4 (heuristically), for strictly positive f,
    /// guarantees two positive solutions straddling m, the H2 radius.
    pub two_solutions_h2_h4: bool,
    /// The norm separator m for whichever two-solution criterion applies.
    pub m: Option<f64>,
    pub constants: ConeConstants,
}

impl Bvp {
    /// Scans the radius grid for H1/H2 and the log-spaced tails for H3/H4.
    ///
    /// `samples_per_radius` y-points (at least 64, endpoints always
    /// included) are used per radius. Exit is deterministic: no randomness
    /// is involved anywhere.
    pub fn check_conditions(
        &self,
        radii: &[f64],
        samples_per_radius: usize,
        sigma_unweighted: bool,
    ) -> Result<ConditionReport, SolverError> {
        if radii.is_empty() {
            return Err(SolverError::InvalidProblem("radius grid must be non-empty".into()));
        }
        if radii.iter().any(|r| !(*r > 0.0)) {
            return Err(SolverError::InvalidProblem("radii must be positive".into()));
        }
        let mut radii = radii.to_vec();
        radii.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let constants = self.cone_constants(sigma_unweighted)?;
        let lambda = self.problem().lambda();
        let samples = samples_per_radius.max(64);

        // H1: max over t and y ∈ [0, r] of λ f / (η r) must stay ≤ 1.
        let mut h1_per_radius = Vec::new();
        let mut h1_radius = None;
        let mut h1_best = f64::INFINITY;
        for &r in &radii {
            let worst = self.extremal_ratio(r, 0.0, samples, |f_val| {
                lambda * f_val / (constants.eta * r)
            })?;
            h1_per_radius.push(RadiusSample { r, ratio: worst });
            if worst <= 1.0 + 1e-12 && h1_radius.is_none() {
                h1_radius = Some(r);
                h1_best = worst;
            }
            if h1_radius.is_none() {
                h1_best = h1_best.min(worst);
            }
        }
        let h1 = SupBoundCheck {
            holds: h1_radius.is_some(),
            radius: h1_radius,
            max_f_over_threshold: h1_best,
            tight: h1_radius.is_some() && (h1_best - 1.0).abs() <= 1e-9,
            per_radius: h1_per_radius,
        };

        // H2: min over t and y ∈ [γr, r] of λ f / (σ r) must stay ≥ 1.
        let mut h2_per_radius = Vec::new();
        let mut h2_radius = None;
        let mut h2_best = f64::NEG_INFINITY;
        for &r in &radii {
            let worst = self.minimal_ratio(r, constants.gamma * r, samples, |f_val| {
                lambda * f_val / (constants.sigma * r)
            })?;
            h2_per_radius.push(RadiusSample { r, ratio: worst });
            if worst >= 1.0 - 1e-12 {
                h2_radius = Some(r); // keep the largest holding radius
                h2_best = worst;
            }
            if h2_radius.is_none() {
                h2_best = h2_best.max(worst);
            }
        }
        let h2 = InfBoundCheck {
            holds: h2_radius.is_some(),
            radius: h2_radius,
            min_f_over_threshold: h2_best,
            per_radius: h2_per_radius,
        };

        let sigma_over_lambda = constants.sigma / lambda;
        let h3 = self.limit_check(&[1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8], sigma_over_lambda)?;
        let h4 = self.limit_check(&[1e2, 1e3, 1e4, 1e5, 1e6, 1e7, 1e8], sigma_over_lambda)?;

        let one_solution_radii = match (h1_radius, h2_radius) {
            (Some(r1), Some(r2)) if r1 < r2 => Some((r1, r2)),
            _ => None,
        };
        let two_h1_h3 = h1.holds && h3.heuristic_holds;
        let two_h2_h4 = h2.holds && h4.heuristic_holds && self.f_strictly_positive(&radii)?;
        let m = if two_h1_h3 {
            h1.radius
        } else if two_h2_h4 {
            h2.radius
        } else {
            None
        };

        Ok(ConditionReport {
            one_solution_applicable: one_solution_radii.is_some(),
            one_solution_radii,
            two_solutions_h1_h3: two_h1_h3,
            two_solutions_h2_h4: two_h2_h4,
            m,
            h1,
            h2,
            h3,
            h4,
            constants,
        })
    }

    /// Max over interior t and uniformly sampled y ∈ [lo, r] of a scaled f.
    fn extremal_ratio(
        &self,
        r: f64,
        lo: f64,
        samples: usize,
        scale: impl Fn(f64) -> f64,
    ) -> Result<f64, SolverError> {
        let mut worst = f64::NEG_INFINITY;
        for k in 0..=samples {
            let y = lo + (r - lo) * k as f64 / samples as f64;
            for s in 0..=self.problem().b() as usize {
                worst = worst.max(scale(self.problem().f_at(s, y)?));
            }
        }
        Ok(worst)
    }

    /// Min over interior t and uniformly sampled y ∈ [lo, r] of a scaled f.
    fn minimal_ratio(
        &self,
        r: f64,
        lo: f64,
        samples: usize,
        scale: impl Fn(f64) -> f64,
    ) -> Result<f64, SolverError> {
        let mut worst = f64::INFINITY;
        for k in 0..=samples {
            let y = lo + (r - lo) * k as f64 / samples as f64;
            for s in 0..=self.problem().b() as usize {
                worst = worst.min(scale(self.problem().f_at(s, y)?));
            }
        }
        Ok(worst)
    }

    /// Evaluates min_t f(t,y)/y along `ys` (ordered toward the limit) and
    /// declares the heuristic satisfied when the ratios grow monotonically
    /// over the three extreme samples and the most extreme one clears the
    /// threshold.
    fn limit_check(&self, ys: &[f64], threshold: f64) -> Result<LimitCheck, SolverError> {
        let mut samples = Vec::with_capacity(ys.len());
        for &y in ys {
            let mut ratio = f64::INFINITY;
            for s in 0..=self.problem().b() as usize {
                ratio = ratio.min(self.problem().f_at(s, y)? / y);
            }
            samples.push(RatioSample { y, ratio });
        }
        let n = samples.len();
        let tail_monotone = samples[n - 1].ratio > samples[n - 2].ratio
            && samples[n - 2].ratio > samples[n - 3].ratio;
        let clears = samples[n - 1].ratio > threshold;
        Ok(LimitCheck {
            heuristic_holds: tail_monotone && clears,
            threshold,
            samples,
        })
    }

    /// Spot check that f > 0 on the sampled region (needed by the H2∧H4
    /// criterion).
    fn f_strictly_positive(&self, radii: &[f64]) -> Result<bool, SolverError> {
        let r_max = radii.last().copied().unwrap_or(1.0);
        for k in 1..=32 {
            let y = r_max * k as f64 / 32.0;
            for s in 0..=self.problem().b() as usize {
                if self.problem().f_at(s, y)? <= 0.0 {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bvp::Problem;
    use crate::expr::Expr;
    use crate::frac::FracOrder;

    fn bvp_with(nu: f64, b: u32, lambda: f64, h: &str, f: &str) -> Bvp {
        let order = FracOrder::new(nu).unwrap();
        let h = Expr::parse(h).unwrap();
        let f = Expr::parse(f).unwrap();
        Bvp::new(Problem::new(order, b, lambda, &h, f).unwrap()).unwrap()
    }

    #[test]
    fn zero_f_satisfies_h1_never_h2() {
        let bvp = bvp_with(1.25, 5, 1.0, "1", "0");
        let report = bvp.check_conditions(&[0.1, 1.0, 10.0], 64, false).unwrap();
        assert!(report.h1.holds);
        assert_eq!(report.h1.radius, Some(0.1));
        assert!(!report.h2.holds);
        assert!(!report.h3.heuristic_holds);
        assert!(!report.one_solution_applicable);
    }

    #[test]
    fn constant_f_is_tight_at_the_equality_radius() {
        // f ≡ η r₀ / λ holds H1 exactly at r₀
        let bvp = bvp_with(1.25, 5, 1.0, "1", "1");
        let eta = bvp.cone_constants(false).unwrap().eta;
        let r0 = 1.0 / eta; // threshold at r0 is η r₀ / λ = 1 = f
        let report = bvp.check_conditions(&[r0], 64, false).unwrap();
        assert!(report.h1.holds);
        assert!(report.h1.tight, "ratio {}", report.h1.max_f_over_threshold);
    }

    #[test]
    fn constant_f_holds_both_bounds_but_in_the_wrong_order() {
        // constant f holds H2 at small radii and H1 at large ones, so the
        // H1-below-H2 bracket never forms
        let bvp = bvp_with(1.25, 5, 1.0, "1", "1");
        let report = bvp
            .check_conditions(&[0.01, 0.1, 1.0, 10.0, 1000.0], 64, false)
            .unwrap();
        assert!(report.h1.holds && report.h2.holds);
        assert!(!report.one_solution_applicable);
    }

    #[test]
    fn quadratic_f_brackets_one_solution() {
        // f = y² is small near 0 (H1 at a small radius) and dominates σr/λ
        // at large radii (H2), giving the r₁ < r₂ bracket
        let bvp = bvp_with(1.25, 5, 1.0, "1", "y^2");
        let report = bvp
            .check_conditions(&[0.01, 1e5], 64, false)
            .unwrap();
        assert!(report.h1.holds && report.h2.holds);
        assert!(report.one_solution_applicable);
        let (r1, r2) = report.one_solution_radii.unwrap();
        assert!(r1 < r2);
        assert_eq!((r1, r2), (0.01, 1e5));
    }

    #[test]
    fn example_family_reports_h1_and_h3() {
        let bvp = bvp_with(1.25, 5, 0.02, "exp(t)", "(1/100)*t*(y^0.5 + y^2)");
        let report = bvp.check_conditions(&[0.01, 0.1, 1.0, 10.0], 64, false).unwrap();
        assert!(report.h1.holds, "h1 ratios: {:?}", report.h1.per_radius);
        assert!(
            report.h3.heuristic_holds,
            "h3 samples: {:?} threshold {}",
            report.h3.samples, report.h3.threshold
        );
        assert!(report.two_solutions_h1_h3);
        assert_eq!(report.m, report.h1.radius);
        // linear growth at ∞ beats y², so H4 should also hold here
        assert!(report.h4.heuristic_holds);
    }

    #[test]
    fn linear_f_fails_the_divergence_heuristics() {
        let bvp = bvp_with(1.25, 5, 1.0, "1", "y");
        let report = bvp.check_conditions(&[1.0], 64, false).unwrap();
        // f/y ≡ 1 is flat: no monotone growth toward either limit
        assert!(!report.h3.heuristic_holds);
        assert!(!report.h4.heuristic_holds);
    }
}
