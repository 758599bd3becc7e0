//! Scalar special functions and 1-D adaptive quadrature.

mod beta;
mod quadrature;

pub use beta::reg_incomplete_beta;
pub use quadrature::{integrate, integrate_with_error, QuadratureSettings, TOL_REL_ENV};

use std::f64::consts::PI;

use crate::error::{domain, Result};

/// `ln Γ(x)` for `x > 0`.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(domain("log_gamma", format!("x must be positive and finite, got {x}")));
    }
    if let Some(g) = gamma_half_integer(x) {
        return Ok(g.ln());
    }
    Ok(libm::lgamma(x))
}

/// `Γ(x)` for `x > 0`. Integer and half-integer arguments go through an exact
/// product so Table-style constants keep full precision.
pub fn gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(domain("gamma", format!("x must be positive and finite, got {x}")));
    }
    Ok(gamma_half_integer(x).unwrap_or_else(|| libm::tgamma(x)))
}

fn gamma_half_integer(x: f64) -> Option<f64> {
    let twice = 2.0 * x;
    if twice.fract() != 0.0 || x > 170.0 {
        return None;
    }
    let k = twice as u64;
    if k.is_multiple_of(2) {
        // Γ(m) = (m-1)!
        let m = k / 2;
        Some((1..m).fold(1.0, |acc, j| acc * j as f64))
    } else {
        // Γ(m + 1/2) = √π · Π_{j=1..m} (j - 1/2)
        let m = k / 2;
        Some((1..=m).fold(PI.sqrt(), |acc, j| acc * (j as f64 - 0.5)))
    }
}

/// `ln B(a, b)`.
pub(crate) fn log_beta(a: f64, b: f64) -> f64 {
    match (gamma_half_integer(a), gamma_half_integer(b), gamma_half_integer(a + b)) {
        (Some(ga), Some(gb), Some(gab)) if gab.is_finite() && gab > 0.0 => (ga * gb / gab).ln(),
        _ => libm::lgamma(a) + libm::lgamma(b) - libm::lgamma(a + b),
    }
}

/// Surface volume of the unit `(k-1)`-sphere in `R^k`: `2π^{k/2} / Γ(k/2)`.
pub fn vol_unit_sphere(k: usize) -> Result<f64> {
    if k < 1 {
        return Err(domain("vol_unit_sphere", "k must be >= 1"));
    }
    let half = k as f64 / 2.0;
    match gamma_half_integer(half) {
        Some(g) if g.is_finite() => {
            let p = PI.powf(half);
            if p.is_finite() {
                return Ok(2.0 * p / g);
            }
            Ok((2f64.ln() + half * PI.ln() - g.ln()).exp())
        }
        _ => Ok((2f64.ln() + half * PI.ln() - libm::lgamma(half)).exp()),
    }
}

/// `H_k = Σ_{j=1..k} 1/j`, summed from the small terms up.
pub fn harmonic_number(k: u64) -> f64 {
    (1..=k).rev().map(|j| 1.0 / j as f64).sum()
}
