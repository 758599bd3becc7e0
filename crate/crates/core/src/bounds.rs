//! Finite-N lower bounds for the Green energy and their asymptotic constants.
//!
//! For every `a ∈ (0, D]` and every configuration of `N` points,
//!
//! ```text
//! E(p_1, …, p_N) ≥ N (1 - 2N + V/V(a)) K(a) - N Θ(a).
//! ```
//!
//! Optimizing the small-`a` expansion gives `a = √C N^{-1/d}` and the
//! leading term `-d C N^{2-2/d} / ((d² - 4) V)`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::ball::BallKernels;
use crate::error::{domain, Error, Result};
use crate::manifold::{Family, ManifoldSpec};
use crate::special::{gamma, log_gamma, vol_unit_sphere};

/// Right-hand side of the finite-N bound at radius `a`.
pub fn finite_bound_with(kernels: &BallKernels, n_points: u64, a: f64) -> Result<f64> {
    let spec = kernels.spec();
    if n_points == 0 {
        return Err(domain("finite_bound", "need at least one point"));
    }
    let a = spec.check_radius("finite_bound", a)?;
    if !(a > 0.0) {
        return Err(domain("finite_bound", "radius must be positive"));
    }
    let n = n_points as f64;
    let (k, theta) = kernels.get(a)?;
    if a >= spec.diameter() {
        return Ok(2.0 * n * (1.0 - n) * k);
    }
    let g = kernels.profile().geometry();
    let frac = g.ball_fraction(a);
    Ok(n * (1.0 - 2.0 * n + 1.0 / frac) * k - n * theta)
}

pub fn finite_bound(spec: ManifoldSpec, n_points: u64, a: f64) -> Result<f64> {
    finite_bound_with(&BallKernels::for_spec(spec)?, n_points, a)
}

/// The optimal-radius constant `C` and the resulting leading coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundCoefficients {
    pub spec: ManifoldSpec,
    pub c_opt: f64,
    /// Coefficient of `N^{2-2/d}` (the bound is `-leading · N^{2-2/d}`), including `1/V`.
    pub leading: f64,
    pub exponent: f64,
}

impl BoundCoefficients {
    /// `√C · N^{-1/d}`.
    pub fn asymptotic_radius(&self, n_points: u64) -> f64 {
        let d = self.spec.dimension() as f64;
        self.c_opt.sqrt() * (n_points as f64).powf(-1.0 / d)
    }
}

/// `C = [d(d-2)(d+2)/4 · (B - V/((d+2) ω))]^{2/d}`, `leading = d C / ((d² - 4) V)`.
pub fn optimal_radius_constant(spec: ManifoldSpec) -> Result<BoundCoefficients> {
    let d = spec.dimension();
    if d <= 2 {
        return Err(Error::UnsupportedDimension {
            op: "optimal_radius_constant",
            family: spec.family(),
            dim: d,
        });
    }
    let df = d as f64;
    let v = spec.volume();
    let bm = spec.bm_constant()?;
    let excess = bm - v / ((df + 2.0) * spec.unit_sphere_factor());
    if !(excess > 0.0) {
        return Err(domain("optimal_radius_constant", format!("B_M does not exceed V/((d+2)ω) on {spec}")));
    }
    let c_opt = (df * (df - 2.0) * (df + 2.0) / 4.0 * excess).powf(2.0 / df);
    Ok(BoundCoefficients {
        spec,
        c_opt,
        leading: df * c_opt / ((df * df - 4.0) * v),
        exponent: 2.0 - 2.0 / df,
    })
}

/// `n^{1+2/n} / ((n² - 4) V_n^{1-2/n} V_{n-1}^{2/n})` with `V_k = vol(S^k)`.
pub fn sphere_leading_coefficient(n: usize) -> Result<f64> {
    if n < 3 {
        return Err(domain("sphere_leading_coefficient", format!("need n >= 3, got {n}")));
    }
    let nf = n as f64;
    let vn = vol_unit_sphere(n + 1)?;
    let vn1 = vol_unit_sphere(n)?;
    Ok(nf.powf(1.0 + 2.0 / nf) / ((nf * nf - 4.0) * vn.powf(1.0 - 2.0 / nf) * vn1.powf(2.0 / nf)))
}

/// The per-family closed leading coefficients, without the `1/V` factor.
pub fn closed_leading_coefficient(spec: ManifoldSpec) -> Result<f64> {
    let n = spec.n() as f64;
    let g = |x: f64| gamma(x).expect("positive argument");
    match spec.family() {
        Family::Sphere if spec.n() >= 3 => Ok(sphere_leading_coefficient(spec.n())? * spec.volume()),
        Family::RealProj if spec.n() >= 3 => {
            Ok(n / (n * n - 4.0) * (g(n / 2.0 + 1.0) * PI.sqrt() / g((n + 1.0) / 2.0)).powf(2.0 / n))
        }
        Family::ComplexProj if spec.n() >= 2 => Ok(n / (2.0 * (n * n - 1.0))),
        Family::QuatProj => Ok(n / ((2.0 * n - 1.0) * (2.0 * n + 1.0).powf(1.0 + 1.0 / (2.0 * n)))),
        Family::CayleyPlane => Ok(4.0 / (63.0 * 165f64.powf(0.125))),
        _ => Err(Error::UnsupportedDimension {
            op: "closed_leading_coefficient",
            family: spec.family(),
            dim: spec.dimension(),
        }),
    }
}

/// The earlier leading coefficients this bound improves on, without `1/V`.
pub fn matzke_coefficient(spec: ManifoldSpec) -> Result<f64> {
    let n = spec.n() as f64;
    match spec.family() {
        Family::RealProj if spec.n() >= 3 => {
            Ok(n / (4.0 * (n - 2.0)) * (PI.sqrt() / gamma((n + 1.0) / 2.0)?).powf(2.0 / n))
        }
        Family::ComplexProj if spec.n() >= 2 => {
            let log_fact = log_gamma(n + 1.0)?;
            Ok(n / (4.0 * (n - 1.0) * (log_fact / n).exp()))
        }
        Family::QuatProj => {
            let log_g = log_gamma(2.0 * n + 2.0)?;
            Ok(n / (2.0 * (2.0 * n - 1.0) * (log_g / (2.0 * n)).exp()))
        }
        Family::CayleyPlane => {
            let fact11: f64 = (1..=11).map(|k| k as f64).product();
            Ok(2.0 / 7.0 * (6.0 / fact11).powf(0.125))
        }
        _ => Err(Error::UnsupportedManifold {
            op: "matzke_coefficient",
            family: spec.family(),
        }),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceConstant {
    pub name: &'static str,
    pub value: f64,
    pub note: &'static str,
}

/// Reference constants for the two-dimensional cases.
pub fn legacy_2d_constants() -> Vec<ReferenceConstant> {
    let ln2 = std::f64::consts::LN_2;
    let c_bhs = 2.0 * ln2 + 0.5 * (2.0f64 / 3.0).ln() + 3.0 * (PI.sqrt().ln() - log_gamma(1.0 / 3.0).unwrap());
    vec![
        ReferenceConstant {
            name: "c_bhs",
            value: c_bhs,
            note: "conjectured log-energy constant on S^2",
        },
        ReferenceConstant {
            name: "lauritsen",
            value: ln2 - 0.75,
            note: "best proved lower constant for the log energy on S^2",
        },
        ReferenceConstant {
            name: "s2_linear_lower",
            value: -1.0 / (8.0 * PI),
            note: "S^2: E + N log N/(4π) >= this · N",
        },
        ReferenceConstant {
            name: "s2_linear_upper",
            value: (2.0 * c_bhs + 1.0 - 2.0 * ln2) / (4.0 * PI),
            note: "S^2: E + N log N/(4π) <= this · N (the -0.9950…/(8π) constant)",
        },
        ReferenceConstant {
            name: "rp2_log",
            value: -1.0 / (4.0 * PI),
            note: "RP^2: coefficient of N log N",
        },
        ReferenceConstant {
            name: "rp2_linear",
            value: (0.5 - ln2) / (4.0 * PI),
            note: "RP^2: coefficient of N",
        },
        ReferenceConstant {
            name: "cp1_log",
            value: -1.0 / PI,
            note: "CP^1: quoted coefficient of N log N",
        },
        ReferenceConstant {
            name: "cp1_linear",
            value: -1.0 / (2.0 * PI),
            note: "CP^1: quoted coefficient of N",
        },
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LeadingKind {
    /// `-leading · N^{2-2/d}`
    Power,
    /// `-leading · N log N` (dimension two)
    NLogN,
}

/// Finite-N bound optimized over the radius.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub spec: ManifoldSpec,
    #[serde(rename = "N")]
    pub n_points: u64,
    pub radius_grid: Vec<(f64, f64)>,
    pub best_a: f64,
    pub best_bound: f64,
    pub asymptotic_a: f64,
    pub asymptotic_bound: f64,
    pub leading_kind: LeadingKind,
    /// Includes the `1/V` factor.
    pub leading_coefficient: f64,
    pub exponent: f64,
    /// Includes the `1/V` factor, for direct comparison with `leading_coefficient`.
    pub matzke_coefficient: Option<f64>,
}

impl BoundReport {
    /// `-leading · N^{exponent}` or `-leading · N log N`.
    pub fn leading_term(&self) -> f64 {
        let n = self.n_points as f64;
        match self.leading_kind {
            LeadingKind::Power => -self.leading_coefficient * n.powf(self.exponent),
            LeadingKind::NLogN => -self.leading_coefficient * n * n.ln(),
        }
    }
}

const GRID_POINTS: usize = 32;
const GOLDEN_ITERS: usize = 80;

fn golden_max(f: &dyn Fn(f64) -> Result<f64>, mut lo: f64, mut hi: f64) -> Result<(f64, f64)> {
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - ratio * (hi - lo);
    let mut x2 = lo + ratio * (hi - lo);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    for _ in 0..GOLDEN_ITERS {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = f(x2)?;
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = f(x1)?;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    Ok(if f1 >= f2 { (x1, f1) } else { (x2, f2) })
}

/// Maximizes the finite-N bound over `a ∈ (0, D]`: a 32-point log grid plus
/// golden-section refinement around the asymptotic radius and around the
/// best grid point.
pub fn best_finite_bound_with(kernels: &BallKernels, n_points: u64) -> Result<BoundReport> {
    if n_points < 2 {
        return Err(domain("best_finite_bound", "need at least two points"));
    }
    let spec = kernels.spec();
    let dia = spec.diameter();
    let d = spec.dimension();
    let n = n_points as f64;
    let (kind, leading, exponent, a_asym) = if d > 2 {
        let co = optimal_radius_constant(spec)?;
        (LeadingKind::Power, co.leading, co.exponent, co.asymptotic_radius(n_points))
    } else {
        (LeadingKind::NLogN, 1.0 / (4.0 * PI), 1.0, (spec.volume() / (PI * n)).sqrt())
    };
    let a_asym = a_asym.min(dia);
    let f = |a: f64| finite_bound_with(kernels, n_points, a);

    let lo_grid = (1e-5 * dia).min(0.1 * a_asym);
    let grid: Vec<f64> = (0..GRID_POINTS)
        .map(|i| lo_grid * (dia / lo_grid).powf(i as f64 / (GRID_POINTS - 1) as f64))
        .map(|a| a.min(dia))
        .collect();
    let mut radius_grid = Vec::with_capacity(GRID_POINTS);
    for &a in &grid {
        radius_grid.push((a, f(a)?));
    }
    let (mut best_a, mut best_bound) = radius_grid
        .iter()
        .copied()
        .fold((f64::NAN, f64::NEG_INFINITY), |acc, (a, b)| if b > acc.1 { (a, b) } else { acc });

    let asymptotic_bound = f(a_asym)?;
    if asymptotic_bound > best_bound {
        best_a = a_asym;
        best_bound = asymptotic_bound;
    }

    let lo = (0.1 * a_asym).max(1e-6).min(0.9 * dia);
    let hi = (10.0 * a_asym).min(0.9 * dia);
    if hi > lo {
        let (a, b) = golden_max(&f, lo, hi)?;
        if b > best_bound {
            best_a = a;
            best_bound = b;
        }
    }
    let i = radius_grid.iter().position(|&(a, _)| a == best_a);
    if let Some(i) = i {
        let lo = grid[i.saturating_sub(1)];
        let hi = grid[(i + 1).min(GRID_POINTS - 1)];
        let (a, b) = golden_max(&f, lo, hi)?;
        if b > best_bound {
            best_a = a;
            best_bound = b;
        }
    }
    let matzke_coefficient = matzke_coefficient(spec).ok().map(|m| m / spec.volume());
    Ok(BoundReport {
        spec,
        n_points,
        radius_grid,
        best_a,
        best_bound,
        asymptotic_a: a_asym,
        asymptotic_bound,
        leading_kind: kind,
        leading_coefficient: leading,
        exponent,
        matzke_coefficient,
    })
}

pub fn best_finite_bound(spec: ManifoldSpec, n_points: u64) -> Result<BoundReport> {
    best_finite_bound_with(&BallKernels::for_spec(spec)?, n_points)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompareRow {
    pub n: usize,
    pub ours: f64,
    pub matzke: f64,
    pub ratio: f64,
}

/// Leading coefficients (without `1/V`) next to the earlier ones, one row per `n`.
pub fn compare_table(family: Family, n_range: std::ops::RangeInclusive<usize>) -> Result<Vec<CompareRow>> {
    if family == Family::Sphere {
        return Err(Error::UnsupportedManifold {
            op: "compare_table",
            family,
        });
    }
    let range = if family == Family::CayleyPlane { 2..=2 } else { n_range };
    range
        .map(|n| {
            let spec = ManifoldSpec::new(family, n)?;
            let ours = optimal_radius_constant(spec)?.leading * spec.volume();
            let matzke = matzke_coefficient(spec)?;
            Ok(CompareRow {
                n,
                ours,
                matzke,
                ratio: ours / matzke,
            })
        })
        .collect()
}
