//! Time-cutoff strategies against priors on the number of items, with the
//! closed form for the geometric prior.

use std::f64::consts::E;

use crate::error::{invalid, Result};
use crate::exact;
use crate::numeric;
use crate::prior::SampleSizeDistribution;
use crate::INV_E;

/// `1/(e-1)`: the largest `θ` for which the geometric optimum is interior.
pub fn geometric_threshold() -> f64 {
    1.0 / (E - 1.0)
}

/// `W(τ_x, Geometric(θ)) = -(θ+x) log((θ+x)/(θ+1))`, from summing
/// `Σ_n θ(θ+1)^{-n} p_n(x)` in closed form.
pub fn geometric_value_closed_form(theta: f64, x: f64) -> Result<f64> {
    if theta.is_nan() || theta <= 0.0 {
        return Err(invalid(format!("θ = {theta} must be positive")));
    }
    if !(0.0..=1.0).contains(&x) {
        return Err(invalid(format!("x = {x} is outside [0, 1]")));
    }
    let u = theta + x;
    Ok(-u * (u / (theta + 1.0)).ln())
}

/// Optimal time cutoff against a geometric prior.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeometricOptimum {
    pub theta: f64,
    /// `max(1/e - θ(e-1)/e, 0)`.
    pub x: f64,
    /// `W(τ_x, ν)` by series summation.
    pub value: f64,
    pub error_bound: f64,
    /// Maximiser found numerically from the series derivative.
    pub numeric_x: f64,
    /// `(θ+1)/e`.
    pub reference_value: f64,
    /// Whether `value = (θ+1)/e` is expected, i.e. `θ <= 1/(e-1)`.
    pub reference_applies: bool,
}

pub fn geometric_optimal_x(theta: f64) -> Result<GeometricOptimum> {
    let nu = SampleSizeDistribution::geometric(theta)?;
    let x = (INV_E - theta * (E - 1.0) / E).max(0.0);
    let v = exact::mixture_value_x(x, &nu)?;
    let (numeric_x, _) = optimal_x(&nu)?;
    Ok(GeometricOptimum {
        theta,
        x,
        value: v.value,
        error_bound: v.error_bound,
        numeric_x,
        reference_value: (theta + 1.0) / E,
        reference_applies: theta <= geometric_threshold(),
    })
}

/// Maximiser of the concave map `x ↦ W(τ_x, ν)` on `[0, 1]` and its value.
pub fn optimal_x(nu: &SampleSizeDistribution) -> Result<(f64, f64)> {
    let slope = |x: f64| exact::mixture_derivative_x(x, nu).map(|m| m.value);
    let x = if slope(0.0)? <= 0.0 {
        0.0
    } else {
        // The slope is -1 + (something that vanishes) at x = 1.
        let (lo, hi) = numeric::bisect(|x| slope(x).unwrap_or(f64::NAN), 0.0, 1.0, 1e-14, 200)
            .ok_or_else(|| invalid("mixture slope has no sign change on [0, 1]"))?;
        0.5 * (lo + hi)
    };
    Ok((x, exact::mixture_value_x(x, nu)?.value))
}

/// Evidence that `τ_{1/e}` is not optimal against `ν`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutoffImprovement {
    pub x: f64,
    pub value: f64,
    pub inv_e_value: f64,
    /// `d/dx W(τ_x, ν)` at `x = 1/e`.
    pub slope_at_inv_e: f64,
}

impl CutoffImprovement {
    pub fn gain(&self) -> f64 {
        self.value - self.inv_e_value
    }
}

/// Move the cutoff left from 1/e (where the slope is negative) to the best
/// time cutoff.
pub fn improve_on_inv_e(nu: &SampleSizeDistribution) -> Result<CutoffImprovement> {
    let slope_at_inv_e = exact::mixture_derivative_x(INV_E, nu)?.value;
    let inv_e_value = exact::mixture_value_x(INV_E, nu)?.value;
    let (x, value) = optimal_x(nu)?;
    Ok(CutoffImprovement { x, value, inv_e_value, slope_at_inv_e })
}
