//! Discrete fractional calculus on shifted integer grids: generalized
//! falling factorials, fractional sums, and fractional differences.
//!
//! The falling factorial is `t^(ν) = Γ(t+1)/Γ(t+1-ν)`, extended by the
//! convention that a pole in the denominator alone gives 0. The ν-th
//! fractional sum of `f` based at `a` is
//!
//! ```text
//! Δ⁻ᵛf(t) = (1/Γ(ν)) Σ_{s=a}^{t-ν} (t-s-1)^(ν-1) f(s),   t ∈ {a+ν, a+ν+1, ...}
//! ```
//!
//! and the ν-th difference is the N-th forward difference of the (N-ν)-th
//! sum, with N the smallest integer ≥ ν. Integer orders dispatch to the
//! exact classical formulas so no Γ-ratio noise enters the most-tested
//! cases.

use crate::error::FracError;
use crate::gamma::{gamma, is_nonpositive_integer, ln_abs_gamma};
use crate::grid::{GridFunction, ShiftedGrid, LATTICE_TOL};

/// Orders within this distance of an integer are treated as exactly integer.
const INTEGER_ORDER_TOL: f64 = 1e-12;

/// A fractional differentiation order ν with 1 < ν ≤ 2, as required by the
/// two-point boundary value problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FracOrder {
    nu: f64,
}

impl FracOrder {
    pub fn new(nu: f64) -> Result<Self, FracError> {
        if !nu.is_finite() || nu <= 1.0 || nu > 2.0 {
            return Err(FracError::Domain(format!(
                "order must satisfy 1 < ν ≤ 2, got {nu}"
            )));
        }
        Ok(Self { nu })
    }

    pub fn value(&self) -> f64 {
        self.nu
    }

    /// True when ν is (numerically) the integer 2.
    pub fn is_integer(&self) -> bool {
        (self.nu - 2.0).abs() <= INTEGER_ORDER_TOL
    }
}

/// Generalized falling factorial `t^(ν) = Γ(t+1)/Γ(t+1-ν)`.
///
/// A pole of Γ in the denominator alone yields exactly 0; poles in both
/// arguments yield the limit of the ratio (so integer arguments reproduce
/// the classical product `t(t-1)...(t-ν+1)`). A pole in the numerator alone
/// is an error.
pub fn falling_factorial(t: f64, order: f64) -> Result<f64, FracError> {
    let rounded = order.round();
    if (order - rounded).abs() <= INTEGER_ORDER_TOL {
        return falling_factorial_integer(t, rounded as i64);
    }
    let num_arg = t + 1.0;
    let den_arg = t + 1.0 - order;
    let num_pole = is_nonpositive_integer(num_arg, LATTICE_TOL);
    let den_pole = is_nonpositive_integer(den_arg, LATTICE_TOL);
    match (num_pole, den_pole) {
        (false, true) => Ok(0.0),
        (true, false) => Err(FracError::PoleNumerator(t)),
        (true, true) => Ok(pole_ratio_limit(num_arg, den_arg)),
        (false, false) => {
            let (ln_n, sign_n) = ln_abs_gamma(num_arg);
            let (ln_d, sign_d) = ln_abs_gamma(den_arg);
            Ok(sign_n * sign_d * (ln_n - ln_d).exp())
        }
    }
}

/// Exact product form for integer orders.
fn falling_factorial_integer(t: f64, n: i64) -> Result<f64, FracError> {
    if n >= 0 {
        let mut product = 1.0;
        for k in 0..n {
            product *= t - k as f64;
        }
        Ok(product)
    } else {
        // t^(-m) = 1 / ((t+1)(t+2)...(t+m)); a vanishing factor means the
        // numerator Γ(t+1) has a pole the denominator does not cancel.
        let mut denom = 1.0;
        for k in 1..=(-n) {
            let factor = t + k as f64;
            if factor.abs() <= LATTICE_TOL {
                return Err(FracError::PoleNumerator(t));
            }
            denom *= factor;
        }
        Ok(1.0 / denom)
    }
}

/// Limit of Γ(x+ε)/Γ(y+ε) as ε → 0 when x and y are both nonpositive
/// integers: (-1)^(m_y - m_x) · m_y! / m_x! with m = -arg.
fn pole_ratio_limit(num_arg: f64, den_arg: f64) -> f64 {
    let m_num = (-num_arg).round();
    let m_den = (-den_arg).round();
    let sign = if ((m_num - m_den) as i64).rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    };
    let (ln_d, _) = ln_abs_gamma(m_den + 1.0);
    let (ln_n, _) = ln_abs_gamma(m_num + 1.0);
    sign * (ln_d - ln_n).exp()
}

/// Number of summands (minus one) for a fractional sum based at `a`,
/// evaluated at `t`: the integer k with `t = a + order + k`. `k = -1` is the
/// empty sum; anything below that, or off-lattice, is a domain error.
fn sum_upper_index(f: &GridFunction, order: f64, t: f64) -> Result<i64, FracError> {
    let rel = t - f.grid().offset() - order;
    let k = rel.round();
    if (rel - k).abs() > LATTICE_TOL {
        return Err(FracError::Domain(format!(
            "t = {t} is not on the lattice offset+{order}+k (distance {:.2e})",
            (rel - k).abs()
        )));
    }
    if k < -1.0 {
        return Err(FracError::Domain(format!(
            "t = {t} lies below the first point of the sum lattice"
        )));
    }
    Ok(k as i64)
}

/// ν-th fractional sum of `f` (based at its grid offset), evaluated at `t`.
pub fn fractional_sum(f: &GridFunction, order: f64, t: f64) -> Result<f64, FracError> {
    if !(order > 0.0) {
        return Err(FracError::Domain(format!("sum order must be positive, got {order}")));
    }
    let k = sum_upper_index(f, order, t)?;
    if k < 0 {
        return Ok(0.0);
    }
    let k = k as usize;
    if k >= f.grid().count() {
        return Err(FracError::Domain(format!(
            "sum at t = {t} needs {} points but the function has {}",
            k + 1,
            f.grid().count()
        )));
    }
    // Kernel argument (t - s - 1) reconstructed on the lattice as
    // order - 1 + (k - j) to avoid accumulating drift from t itself.
    let mut acc = 0.0;
    for j in 0..=k {
        let kernel = falling_factorial(order - 1.0 + (k - j) as f64, order - 1.0)?;
        acc += kernel * f.value(j);
    }
    Ok(acc / gamma(order))
}

/// ν-th fractional difference `Δᵛf(t) = Δᴺ(Δ^{-(N-ν)}f)(t)` with N = ⌈ν⌉.
///
/// For integer ν this is exactly the classical forward difference of that
/// order. The result lives on the lattice shifted by N-ν from the grid of
/// `f`.
pub fn fractional_difference(f: &GridFunction, order: f64, t: f64) -> Result<f64, FracError> {
    if !(order > 0.0) {
        return Err(FracError::Domain(format!(
            "difference order must be positive, got {order}"
        )));
    }
    let rounded = order.round();
    if (order - rounded).abs() <= INTEGER_ORDER_TOL {
        return integer_forward_difference(f, rounded as u32, t);
    }
    let n = order.ceil() as u32;
    let mu = n as f64 - order; // in (0, 1)
    let mut acc = 0.0;
    for j in 0..=n {
        let coeff = if (n - j) % 2 == 0 { 1.0 } else { -1.0 };
        acc += coeff * binomial(n, j) * fractional_sum(f, mu, t + j as f64)?;
    }
    Ok(acc)
}

/// Classical N-th forward difference at a grid point.
fn integer_forward_difference(f: &GridFunction, n: u32, t: f64) -> Result<f64, FracError> {
    if n == 0 {
        return Err(FracError::Domain("difference order must be positive".into()));
    }
    let i = f.grid().index_of(t).ok_or_else(|| {
        FracError::Domain(format!("t = {t} is not a grid point of the operand"))
    })?;
    if i + n as usize >= f.grid().count() {
        return Err(FracError::Domain(format!(
            "difference of order {n} at t = {t} runs past the end of the grid"
        )));
    }
    let mut acc = 0.0;
    for j in 0..=n {
        let coeff = if (n - j) % 2 == 0 { 1.0 } else { -1.0 };
        acc += coeff * binomial(n, j) * f.value(i + j as usize);
    }
    Ok(acc)
}

/// First forward difference as a grid function: g_i = f_{i+1} - f_i on a
/// grid with one fewer point and the same offset.
pub fn forward_difference(f: &GridFunction) -> Result<GridFunction, FracError> {
    if f.grid().count() < 2 {
        return Err(FracError::Domain(
            "forward difference needs at least two points".into(),
        ));
    }
    let grid = ShiftedGrid::new(f.grid().offset(), f.grid().count() - 1)?;
    let values = f
        .values()
        .windows(2)
        .map(|w| w[1] - w[0])
        .collect::<Vec<_>>();
    GridFunction::new(grid, values)
}

fn binomial(n: u32, k: u32) -> f64 {
    let k = k.min(n - k);
    let mut c = 1.0;
    for i in 0..k {
        c = c * (n - i) as f64 / (i + 1) as f64;
    }
    c
}
