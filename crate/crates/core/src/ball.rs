//! Ball averages of the Green function.
//!
//! ```text
//! K(a) = 1/(V V(a)) ∫_0^a v(r) ∫_0^r V(u)/v(u) du dr
//! Θ(a) = 1/V(a) ∫_0^a v(r) φ(r) dr
//! ```
//!
//! Both are available by quadrature for every family and in closed form for
//! `CP^n`, `HP^n` and `OP^2`.

use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::green::{flux_ratio, RadialGreenProfile};
use crate::manifold::{Family, ManifoldSpec, RadialGeometry};
use crate::special::{harmonic_number, integrate, QuadratureSettings};

/// Offset from `D` below which the outer K integral switches to `u = D - e^{-w}`.
const TAIL: f64 = 1e-3;
const TAIL_W_MAX: f64 = 40.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelMethod {
    Quadrature,
    ClosedForm,
    Asymptotic,
}

/// `K(a)` and `Θ(a)` for one radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BallKernelValue {
    pub spec: ManifoldSpec,
    pub a: f64,
    pub k_value: f64,
    pub theta_value: f64,
    pub method: KernelMethod,
}

impl BallKernelValue {
    /// Leading small-radius terms `a²/(2(d+2)V)` and `d B a^{2-d}/(2V)`.
    pub fn asymptotic(spec: ManifoldSpec, a: f64) -> Result<Self> {
        Ok(Self {
            spec,
            a,
            k_value: k_leading(&spec, a)?,
            theta_value: theta_leading(&spec, a)?,
            method: KernelMethod::Asymptotic,
        })
    }
}

fn check_ball_radius(spec: &ManifoldSpec, op: &'static str, a: f64) -> Result<f64> {
    if !(a > 0.0) {
        return Err(domain(op, format!("radius must be positive, got {a}")));
    }
    spec.check_radius(op, a)
}

pub fn k_leading(spec: &ManifoldSpec, a: f64) -> Result<f64> {
    let a = check_ball_radius(spec, "k_leading", a)?;
    let d = spec.dimension() as f64;
    Ok(a * a / (2.0 * (d + 2.0) * spec.volume()))
}

pub fn theta_leading(spec: &ManifoldSpec, a: f64) -> Result<f64> {
    let a = check_ball_radius(spec, "theta_leading", a)?;
    let d = spec.dimension();
    let bm = spec.bm_constant()?;
    Ok(d as f64 * bm * a.powi(2 - d as i32) / (2.0 * spec.volume()))
}

/// `V(u) / v(u)`, zero at the origin.
fn inner_ratio(g: &RadialGeometry, u: f64) -> f64 {
    if u <= 0.0 {
        return 0.0;
    }
    g.ball_volume(u) / g.sphere_area(u)
}

/// `V(D - eps) / v(D - eps)`.
fn inner_ratio_top(g: &RadialGeometry, eps: f64) -> f64 {
    (g.volume - g.complement_from_top(eps)) / (g.sphere_factor * g.density_from_top(eps))
}

/// `K(a)` by nested quadrature of its defining double integral.
pub fn k_quadrature(spec: &ManifoldSpec, a: f64, settings: &QuadratureSettings) -> Result<f64> {
    let a = check_ball_radius(spec, "k_quadrature", a)?;
    let g = spec.geometry();
    let j = |r: f64| integrate(|u| inner_ratio(&g, u), 0.0, r, settings);
    let outer_body = |r: f64, settings: &QuadratureSettings| -> Result<f64> {
        let err = RefCell::new(None);
        let val = integrate(
            |r| match j(r) {
                Ok(jr) => g.sphere_area(r) * jr,
                Err(e) => {
                    err.borrow_mut().get_or_insert(e);
                    f64::NAN
                }
            },
            0.0,
            r,
            settings,
        );
        match err.into_inner() {
            Some(e) => Err(e),
            None => val,
        }
    };
    let split = g.diameter - TAIL;
    if a <= split {
        return Ok(outer_body(a, settings)? / (g.volume * g.ball_volume(a)));
    }
    let head = outer_body(split, settings)?;
    let j_split = j(split)?;
    // r = D - e^{-w}
    let w0 = -TAIL.ln();
    let w1 = if a >= g.diameter { TAIL_W_MAX } else { (-(g.diameter - a).ln()).min(TAIL_W_MAX) };
    let j_tail = |w: f64| -> Result<f64> {
        let rest = integrate(
            |t| {
                let eps = (-t).exp();
                inner_ratio_top(&g, eps) * eps
            },
            w0,
            w,
            settings,
        )?;
        Ok(j_split + rest)
    };
    let err = RefCell::new(None);
    let tail = integrate(
        |w| {
            let eps = (-w).exp();
            match j_tail(w) {
                Ok(jr) => g.sphere_factor * g.density_from_top(eps) * jr * eps,
                Err(e) => {
                    err.borrow_mut().get_or_insert(e);
                    f64::NAN
                }
            }
        },
        w0,
        w1,
        settings,
    );
    if let Some(e) = err.into_inner() {
        return Err(e);
    }
    let va = g.volume - g.ball_complement(a);
    Ok((head + tail?) / (g.volume * va))
}

/// `V(a) - V(r)` for `r ≤ a`, switching to complements in the upper half.
fn ball_difference(g: &RadialGeometry, a: f64, r: f64, a_upper: bool, comp_a: f64) -> f64 {
    if a_upper {
        g.ball_complement(r) - comp_a
    } else {
        g.ball_volume(a) - g.ball_volume(r)
    }
}

/// `K(a) = 1/(V V(a)) ∫_0^a V(r) (V(a) - V(r)) / v(r) dr`, the single
/// integral left after integrating the inner one by parts.
pub fn k_by_parts(spec: &ManifoldSpec, a: f64, settings: &QuadratureSettings) -> Result<f64> {
    let a = check_ball_radius(spec, "k_by_parts", a)?;
    let g = spec.geometry();
    let upper = g.ball_fraction(a) > 0.5;
    let comp_a = g.ball_complement(a);
    let va = if upper { g.volume - comp_a } else { g.ball_volume(a) };
    let i = integrate(
        |r| {
            if r <= 0.0 {
                return 0.0;
            }
            let v = g.sphere_area(r);
            if v == 0.0 {
                return 0.0;
            }
            g.ball_volume(r) * ball_difference(&g, a, r, upper, comp_a) / v
        },
        0.0,
        a,
        settings,
    )?;
    Ok(i / (g.volume * va))
}

/// `Θ(a)` by quadrature of `v φ` over the ball, or over its complement when
/// the ball holds more than half the volume (`∫_0^D v φ = 0`).
pub fn theta_quadrature(profile: &RadialGreenProfile, a: f64) -> Result<f64> {
    let spec = profile.spec();
    let a = check_ball_radius(&spec, "theta_quadrature", a)?;
    let g = *profile.geometry();
    if a >= g.diameter {
        return Ok(0.0);
    }
    let settings = profile.settings();
    let err = RefCell::new(None);
    let f = |r: f64| {
        if r <= 0.0 {
            return 0.0;
        }
        match profile.eval(r) {
            Ok(p) => g.sphere_area(r) * p,
            Err(e) => {
                err.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        }
    };
    let rc = profile.r_cut();
    let val = if g.ball_fraction(a) <= 0.5 {
        let inner = integrate(f, 0.0, a.min(rc), settings)?;
        let outer = if a > rc { integrate(f, rc, a, settings)? } else { 0.0 };
        (inner + outer) / g.ball_volume(a)
    } else {
        -integrate(f, a, g.diameter, settings)? / (g.volume - g.ball_complement(a))
    };
    match err.into_inner() {
        Some(e) => Err(e),
        None => Ok(val),
    }
}

/// `Θ(a)` after one integration by parts:
/// `(1/V) [φ̂(a) + C + (1/V(a)) ∫_0^a V(r) (V - V(r))/v(r) dr]`,
/// or the equivalent complement form above half volume. Cheaper than
/// [`theta_quadrature`] since `φ̂` is evaluated once.
pub fn theta_by_parts(profile: &RadialGreenProfile, a: f64) -> Result<f64> {
    let spec = profile.spec();
    let a = check_ball_radius(&spec, "theta_by_parts", a)?;
    let g = *profile.geometry();
    if a >= g.diameter {
        return Ok(0.0);
    }
    let settings = profile.settings();
    let ph = profile.phi_hat(a)?;
    let c = profile.c_m();
    if g.ball_fraction(a) <= 0.5 {
        let va = g.ball_volume(a);
        let i = integrate(|r| if r <= 0.0 { 0.0 } else { g.ball_volume(r) * flux_ratio(&g, r) }, 0.0, a, settings)?;
        Ok((ph + c + i / va) / g.volume)
    } else {
        let wa = g.ball_complement(a);
        let i = integrate(|r| g.ball_complement(r) * flux_ratio(&g, r), a, g.diameter, settings)?;
        Ok(-(wa * (ph + c) - i) / (g.volume * (g.volume - wa)))
    }
}

fn no_closed_form(spec: &ManifoldSpec) -> Error {
    Error::NoClosedForm { family: spec.family() }
}

/// Sums `Σ_{m ≥ m0} term(m)` of a positive series until the terms stop mattering.
fn positive_series(m0: u64, mut term: impl FnMut(u64) -> f64) -> f64 {
    let mut sum = 0.0;
    for m in m0..m0 + 100_000 {
        let t = term(m);
        sum += t;
        if t <= 1e-18 * sum.abs() && m > m0 + 4 {
            break;
        }
    }
    sum
}

/// `K(a)` from the closed formulas. Small `sin² a` uses exact term-by-term
/// rearrangements of the same expressions so nothing cancels.
pub fn k_closed(spec: &ManifoldSpec, a: f64) -> Result<f64> {
    let a = check_ball_radius(spec, "k_closed", a)?;
    let v = spec.volume();
    let n = spec.n() as u64;
    let nf = n as f64;
    let at_top = a >= spec.diameter();
    let (s, c) = a.sin_cos();
    let x = s * s;
    let y = c * c;
    let log1m = 2.0 * c.abs().ln(); // ln(1 - S²)
    match spec.family() {
        Family::ComplexProj => {
            if at_top {
                return Ok(harmonic_number(n) / (4.0 * nf * v));
            }
            if x <= 0.95 {
                let sum = positive_series(1, |m| {
                    let mf = m as f64;
                    x.powi(m as i32) / (mf * (mf + nf))
                });
                return Ok(sum / (4.0 * v));
            }
            let s2n = x.powi(n as i32);
            let one_minus = -(nf * (-y).ln_1p()).exp_m1();
            let partial: f64 = (1..=n).rev().map(|k| x.powi(k as i32) / k as f64).sum();
            Ok((one_minus * log1m + partial) / (4.0 * nf * v * s2n))
        }
        Family::QuatProj => {
            let q = 2.0 * nf * y + 1.0;
            if at_top {
                return Ok(harmonic_number(2 * n + 1) / (4.0 * (2.0 * nf + 1.0) * v));
            }
            if x <= 0.95 {
                let sum = positive_series(2, |m| {
                    let mf = m as f64;
                    x.powi(m as i32) / (mf * (mf - 1.0) * (mf + 2.0 * nf))
                });
                return Ok((x - 2.0 * nf * sum) / (4.0 * q * v));
            }
            let s4n = x.powi(2 * n as i32);
            let partial: f64 = (1..=2 * n + 1).rev().map(|k| x.powi(k as i32) / k as f64).sum();
            // 1/S^{4n} - q, as (1-y)^{-2n} - 1 - 2ny
            let gap = (-2.0 * nf * (-y).ln_1p()).exp_m1() - 2.0 * nf * y;
            let bracket = partial / s4n + log1m * gap;
            Ok(bracket / (4.0 * (2.0 * nf + 1.0) * q * v))
        }
        Family::CayleyPlane => {
            if at_top {
                return Ok(83711.0 / (1_219_680.0 * v));
            }
            let p = 165.0 - 440.0 * x + 396.0 * x * x - 120.0 * x * x * x;
            if x <= 0.5 {
                let sum = positive_series(12, |m| {
                    let mf = m as f64;
                    x.powi(m as i32) / (mf * (mf - 8.0) * (mf - 9.0) * (mf - 10.0) * (mf - 11.0))
                });
                let num = x.powi(9) * (5_590_200.0 - 11_739_420.0 * x + 7_216_440.0 * x * x) - 219_542_400.0 * sum;
                return Ok(num / (1_219_680.0 * v * x.powi(8) * p));
            }
            let s2 = x;
            let poly = s2
                * (27720.0
                    + s2 * (13860.0
                        + s2 * (9240.0
                            + s2 * (6930.0
                                + s2 * (5544.0
                                    + s2 * (4620.0
                                        + s2 * (3960.0
                                            + s2 * (3465.0
                                                + s2 * (1_019_480.0 + s2 * (-1_826_748.0 + s2 * 815_640.0))))))))));
            let q = 1.0 + s2.powi(8) * (-165.0 + s2 * (440.0 + s2 * (-396.0 + s2 * 120.0)));
            Ok((poly + 27720.0 * q * log1m) / (1_219_680.0 * v * s2.powi(8) * p))
        }
        _ => Err(no_closed_form(spec)),
    }
}

/// Taylor coefficients of `V Θ(OP², a)` in `y = cos² a`, from `y⁴` on.
const OP2_THETA_TOP: [f64; 42] = [
    22.649080086580087,
    -143.33484848484848,
    396.83712121212121,
    -621.91017316017316,
    8069.9303300865801,
    -89505.808080808081,
    500595.57575757576,
    -1750294.5812672176,
    6722563.2589285714,
    -50840015.801282051,
    374745092.06547619,
    -1974425158.2015152,
    8405383363.6334551,
    -41133167574.915330,
    263402564658.72475,
    -1635072480192.8094,
    8534067633125.9870,
    -41018239523991.912,
    217128179039086.33,
    -1284456925403406.9,
    7381229700724845.5,
    -38864769775934871.,
    1.9932872002983200e+17,
    -1.0812456123919352e+18,
    6.1379033511737706e+18,
    -3.4097831166860270e+19,
    1.8156760217965872e+20,
    -9.6156729757115244e+20,
    5.2478444421247380e+21,
    -2.9154445085995463e+22,
    1.5970123648001143e+23,
    -8.5779120179922332e+23,
    4.6116185114328307e+24,
    -2.5176613204291977e+25,
    1.3832958343866071e+26,
    -7.5367281352671420e+26,
    4.0707110889369652e+27,
    -2.2033017437173296e+28,
    1.2015927791886133e+29,
    -6.5657092628508777e+29,
    3.5707954976624900e+30,
    -1.9348923985300119e+31,
];

/// `Σ_{j ≥ j0} y^j Σ_k w_k C(k+j-1, j)`: expansion of `Σ_k w_k (1-y)^{-k}`
/// beyond order `j0 - 1`. All terms are positive.
fn inverse_power_tail(weights: &[(u64, f64)], y: f64, j0: u64) -> (Vec<f64>, f64) {
    // t[i] = C(k+j-1, j) y^j for the k of weights[i]
    let mut t: Vec<f64> = vec![1.0; weights.len()];
    let mut per_order = Vec::new();
    let mut total = 0.0;
    for j in 1..100_000u64 {
        let mut s = 0.0;
        for (ti, &(k, w)) in t.iter_mut().zip(weights) {
            *ti *= y * (k + j - 1) as f64 / j as f64;
            s += w * *ti;
        }
        if j >= j0 {
            total += s;
            per_order.push(s);
            let still_growing = weights.iter().any(|&(k, _)| (k + j) as f64 * y > j as f64);
            if !still_growing && s <= 1e-18 * total {
                break;
            }
        }
    }
    (per_order, total)
}

/// `Θ(a)` from the closed formulas. Near `a = D`, where the formulas cancel
/// down to `Θ(D) = 0`, their expansions in `cos² a` are used instead.
pub fn theta_closed(spec: &ManifoldSpec, a: f64) -> Result<f64> {
    let a = check_ball_radius(spec, "theta_closed", a)?;
    let v = spec.volume();
    let n = spec.n() as u64;
    let nf = n as f64;
    if !matches!(spec.family(), Family::ComplexProj | Family::QuatProj | Family::CayleyPlane) {
        return Err(no_closed_form(spec));
    }
    if a >= spec.diameter() {
        return Ok(0.0);
    }
    let (s, c) = a.sin_cos();
    let x = s * s;
    let y = c * c;
    match spec.family() {
        Family::ComplexProj => {
            let weights: Vec<(u64, f64)> = (1..n).map(|k| (k, nf / 2.0 / (k * (n - k)) as f64)).collect();
            if y < 0.1 {
                let (_, tail) = inverse_power_tail(&weights, y, 1);
                let log_part = positive_series(1, |j| y.powi(j as i32) / (2.0 * j as f64));
                return Ok((tail + log_part) / (2.0 * nf * v));
            }
            let sum: f64 = weights.iter().rev().map(|&(k, w)| w / x.powi(k as i32)).sum();
            Ok((-harmonic_number(n - 1) - s.ln() + sum) / (2.0 * nf * v))
        }
        Family::QuatProj => {
            let q = 2.0 * nf * y + 1.0;
            let m = 2 * n;
            if y < 0.1 {
                let weights: Vec<(u64, f64)> = (1..m)
                    .map(|k| (k, 2.0 * nf * (2.0 * nf + 1.0) / (k * (k + 1) * (m - k)) as f64))
                    .collect();
                let (_, tail) = inverse_power_tail(&weights, y, 2);
                // -(1 + 2ny) ln(1 - y), from y² on
                let log_part = positive_series(2, |j| {
                    let jf = j as f64;
                    y.powi(j as i32) * (1.0 / jf + 2.0 * nf / (jf - 1.0))
                });
                return Ok((tail + log_part) / (4.0 * (2.0 * nf + 1.0) * q * v));
            }
            let sum: f64 = (1..m).rev().map(|k| 1.0 / ((k * (k + 1) * (m - k)) as f64 * x.powi(k as i32))).sum();
            let val = nf / (2.0 * q) * sum
                - harmonic_number(m - 1) / (2.0 * (2.0 * nf + 1.0))
                - s.ln() / (2.0 * (2.0 * nf + 1.0))
                - (1.0 + 2.0 * (nf - 1.0) * x) / (4.0 * (2.0 * nf + 1.0) * q);
            Ok(val / v)
        }
        _ => {
            if y < 0.03 {
                let series = OP2_THETA_TOP.iter().rev().fold(0.0, |acc, &co| acc * y + co);
                return Ok(series * y.powi(4) / v);
            }
            let p = 165.0 - 440.0 * x + 396.0 * x * x - 120.0 * x * x * x;
            let num = [
                330.0, 275.0, 330.0, 495.0, 924.0, 2310.0, 9900.0, -190150.0, 427500.0, -353334.0, 101420.0,
            ]
            .iter()
            .rev()
            .fold(0.0, |acc, &co| acc * x + co);
            Ok((num / (9240.0 * x.powi(7) * p) - s.ln() / 22.0) / v)
        }
    }
}

/// Mean of `G(p, ·)` over `B(p₀, a)` with `t = d(p₀, p)`:
/// `φ(t) + K(a)` when `t ≥ a`, minus
/// `(1/V(a)) ∫_t^a v(r) ∫_t^r du/v(u) dr` when `t < a`.
pub fn ball_average_green(profile: &RadialGreenProfile, t: f64, a: f64) -> Result<f64> {
    let spec = profile.spec();
    let g = *profile.geometry();
    if !(a > 0.0 && a < g.diameter) {
        return Err(domain("ball_average_green", format!("radius {a} outside (0, D)")));
    }
    if t == 0.0 {
        return Err(Error::Singularity { i: 0, j: 1, distance: 0.0 });
    }
    let t = spec.check_radius("ball_average_green", t)?;
    let base = profile.eval(t)? + kernel_k(&spec, a, profile.settings())?;
    if t >= a {
        return Ok(base);
    }
    Ok(base - ball_correction(profile, t, a)?)
}

/// `(1/V(a)) ∫_t^a v(r) L(r) dr` with `L(r) = ∫_t^r du/v(u)`, integrated by
/// parts into `(1/V(a)) [(V(a) - V(t)) L(a) - ∫_t^a (V(r) - V(t))/v(r) dr]`.
fn ball_correction(profile: &RadialGreenProfile, t: f64, a: f64) -> Result<f64> {
    let g = *profile.geometry();
    let settings = profile.settings();
    let vt = g.ball_volume(t);
    let va = g.ball_volume(a);
    let l = integrate(|u| 1.0 / g.sphere_area(u), t, a, settings)?;
    let i = integrate(|r| (g.ball_volume(r) - vt) / g.sphere_area(r), t, a, settings)?;
    Ok(((va - vt) * l - i) / va)
}

/// Mean of `G(p, ·)` over the sphere `S(p₀, a)` for `a < t = d(p₀, p)`:
/// `φ(t) + (1/V) ∫_0^a V(u)/v(u) du`.
pub fn spherical_mean(profile: &RadialGreenProfile, t: f64, a: f64) -> Result<f64> {
    let spec = profile.spec();
    if !(a >= 0.0 && a < t) {
        return Err(domain("spherical_mean", format!("need 0 <= a < t, got a = {a}, t = {t}")));
    }
    let t = spec.check_radius("spherical_mean", t)?;
    let g = *profile.geometry();
    let i = integrate(|u| inner_ratio(&g, u), 0.0, a, profile.settings())?;
    Ok(profile.eval(t)? + i / g.volume)
}

fn has_closed_form(spec: &ManifoldSpec) -> bool {
    matches!(spec.family(), Family::ComplexProj | Family::QuatProj | Family::CayleyPlane)
}

/// `K(a)` by the cheapest accurate route.
pub fn kernel_k(spec: &ManifoldSpec, a: f64, settings: &QuadratureSettings) -> Result<f64> {
    if has_closed_form(spec) {
        k_closed(spec, a)
    } else {
        k_by_parts(spec, a, settings)
    }
}

/// Memoized `K` and `Θ` for one manifold; safe to share across threads.
#[derive(Debug)]
pub struct BallKernels {
    profile: Arc<RadialGreenProfile>,
    cache: RwLock<HashMap<u64, (f64, f64)>>,
}

impl BallKernels {
    pub fn new(profile: Arc<RadialGreenProfile>) -> Self {
        Self {
            profile,
            cache: RwLock::new(HashMap::new()),
        }
    }

    pub fn for_spec(spec: ManifoldSpec) -> Result<Self> {
        Ok(Self::new(RadialGreenProfile::shared(spec)?))
    }

    pub fn profile(&self) -> &Arc<RadialGreenProfile> {
        &self.profile
    }

    pub fn spec(&self) -> ManifoldSpec {
        self.profile.spec()
    }

    pub fn method(&self) -> KernelMethod {
        if has_closed_form(&self.spec()) {
            KernelMethod::ClosedForm
        } else {
            KernelMethod::Quadrature
        }
    }

    /// `(K(a), Θ(a))`.
    pub fn get(&self, a: f64) -> Result<(f64, f64)> {
        let spec = self.spec();
        let a = check_ball_radius(&spec, "BallKernels::get", a)?;
        if let Some(&v) = self.cache.read().unwrap().get(&a.to_bits()) {
            return Ok(v);
        }
        let v = if has_closed_form(&spec) {
            (k_closed(&spec, a)?, theta_closed(&spec, a)?)
        } else {
            (
                k_by_parts(&spec, a, self.profile.settings())?,
                theta_by_parts(&self.profile, a)?,
            )
        };
        self.cache.write().unwrap().insert(a.to_bits(), v);
        Ok(v)
    }

    pub fn value(&self, a: f64) -> Result<BallKernelValue> {
        let (k, theta) = self.get(a)?;
        Ok(BallKernelValue {
            spec: self.spec(),
            a,
            k_value: k,
            theta_value: theta,
            method: self.method(),
        })
    }

    pub fn cached_len(&self) -> usize {
        self.cache.read().unwrap().len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn tight() -> QuadratureSettings {
        QuadratureSettings::default().with_rel_tol(1e-12)
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    fn literal_k(spec: &ManifoldSpec, a: f64) -> f64 {
        let v = spec.volume();
        let nf = spec.n() as f64;
        let n = spec.n() as i32;
        let s = a.sin();
        let l = (1.0 - s * s).ln();
        match spec.family() {
            Family::ComplexProj => {
                let sum: f64 = (1..=n).map(|k| s.powi(2 * k) / k as f64).sum();
                ((1.0 - s.powi(2 * n)) * l + sum) / (4.0 * nf * v * s.powi(2 * n))
            }
            Family::QuatProj => {
                let q = 2.0 * nf * (1.0 - s * s) + 1.0;
                let sum: f64 = (1..=2 * n + 1).map(|k| s.powi(2 * k) / k as f64).sum();
                ((sum + l) / s.powi(4 * n) - q * l) / (4.0 * (2.0 * nf + 1.0) * q * v)
            }
            _ => {
                let p = -120.0 * s.powi(6) + 396.0 * s.powi(4) - 440.0 * s * s + 165.0;
                let c = [27720.0, 13860.0, 9240.0, 6930.0, 5544.0, 4620.0, 3960.0, 3465.0, 1019480.0, -1826748.0, 815640.0];
                let poly: f64 = s * s * c.iter().enumerate().map(|(i, c)| c * s.powi(2 * i as i32)).sum::<f64>();
                let q = 120.0 * s.powi(22) - 396.0 * s.powi(20) + 440.0 * s.powi(18) - 165.0 * s.powi(16) + 1.0;
                (poly + 27720.0 * q * l) / (1219680.0 * v * s.powi(16) * p)
            }
        }
    }

    fn literal_theta(spec: &ManifoldSpec, a: f64) -> f64 {
        let v = spec.volume();
        let n = spec.n() as u64;
        let nf = n as f64;
        let s = a.sin();
        match spec.family() {
            Family::ComplexProj => {
                let sum: f64 = (1..n).map(|k| 1.0 / ((k * (n - k)) as f64 * s.powi(2 * k as i32))).sum();
                (-harmonic_number(n - 1) - s.ln() + nf / 2.0 * sum) / (2.0 * nf * v)
            }
            Family::QuatProj => {
                let q = 2.0 * nf * (1.0 - s * s) + 1.0;
                let sum: f64 = (1..2 * n)
                    .map(|k| 1.0 / ((k * (k + 1) * (2 * n - k)) as f64 * s.powi(2 * k as i32)))
                    .sum();
                (nf / (2.0 * q) * sum
                    - harmonic_number(2 * n - 1) / (2.0 * (2.0 * nf + 1.0))
                    - s.ln() / (2.0 * (2.0 * nf + 1.0))
                    - (1.0 + 2.0 * (nf - 1.0) * s * s) / (4.0 * (2.0 * nf + 1.0) * q))
                    / v
            }
            _ => {
                let p = -120.0 * s.powi(6) + 396.0 * s.powi(4) - 440.0 * s * s + 165.0;
                let c = [330.0, 275.0, 330.0, 495.0, 924.0, 2310.0, 9900.0, -190150.0, 427500.0, -353334.0, 101420.0];
                let poly: f64 = c.iter().enumerate().map(|(i, c)| c * s.powi(2 * i as i32)).sum();
                (poly / (9240.0 * s.powi(14) * p) - s.ln() / 22.0) / v
            }
        }
    }

    fn closed_specs() -> Vec<ManifoldSpec> {
        let mut v: Vec<ManifoldSpec> = [1, 2, 3, 5, 10].iter().map(|&n| ManifoldSpec::complex_proj(n).unwrap()).collect();
        v.extend([1, 2, 3, 5].iter().map(|&n| ManifoldSpec::quat_proj(n).unwrap()));
        v.push(ManifoldSpec::cayley_plane());
        v
    }

    #[test]
    fn closed_forms_match_literal_formulas_where_conditioned() {
        for spec in closed_specs() {
            for &a in &[0.6, 0.9, 1.0, 1.2, 1.4] {
                let (k, kl) = (k_closed(&spec, a).unwrap(), literal_k(&spec, a));
                assert!(rel(k, kl) < 1e-9, "{spec} a={a}: K {k} vs {kl}");
                let (t, tl) = (theta_closed(&spec, a).unwrap(), literal_theta(&spec, a));
                assert!(rel(t, tl) < 1e-9, "{spec} a={a}: Θ {t} vs {tl}");
            }
        }
    }

    #[test]
    fn series_branches_are_continuous() {
        // each branch switch, approached from both sides
        for spec in closed_specs() {
            let xs = match spec.family() {
                Family::CayleyPlane => vec![0.5f64, 0.97],
                _ => vec![0.95, 0.9],
            };
            for x in xs {
                let a = x.sqrt().asin();
                let (lo, hi) = (a * (1.0 - 1e-13), a * (1.0 + 1e-13));
                assert!(rel(k_closed(&spec, lo).unwrap(), k_closed(&spec, hi).unwrap()) < 1e-9, "{spec} K at {a}");
                let (tl, th) = (theta_closed(&spec, lo).unwrap(), theta_closed(&spec, hi).unwrap());
                assert!(rel(tl, th) < 1e-9, "{spec} Θ at {a}: {tl} vs {th}");
            }
        }
    }

    #[test]
    fn k_closed_matches_nested_quadrature() {
        let q = tight();
        for spec in closed_specs() {
            for &a in &[0.2, 0.6, 1.0, 1.4, 1.55, FRAC_PI_2 - 1e-4, FRAC_PI_2] {
                let kq = k_quadrature(&spec, a, &q).unwrap();
                let kc = k_closed(&spec, a).unwrap();
                assert!(rel(kc, kq) < 1e-7, "{spec} a={a}: {kc} vs {kq}");
            }
        }
    }

    #[test]
    fn theta_closed_matches_quadrature() {
        for spec in closed_specs() {
            let prof = RadialGreenProfile::with_settings(spec, tight()).unwrap();
            for &a in &[0.2, 0.6, PI / 4.0, 1.0, 1.4, 1.55] {
                let tq = theta_quadrature(&prof, a).unwrap();
                let tc = theta_closed(&spec, a).unwrap();
                assert!(rel(tc, tq) < 1e-6, "{spec} a={a}: {tc} vs {tq}");
            }
        }
    }

    #[test]
    fn top_values() {
        for n in 1..8 {
            let spec = ManifoldSpec::complex_proj(n).unwrap();
            let want = harmonic_number(n as u64) / (4.0 * n as f64 * spec.volume());
            assert!(rel(k_closed(&spec, FRAC_PI_2).unwrap(), want) < 1e-14);
            assert!(rel(k_quadrature(&spec, FRAC_PI_2, &tight()).unwrap(), want) < 1e-9);
            assert!(rel(k_closed(&spec, FRAC_PI_2 - 1e-9).unwrap(), want) < 1e-7);
            assert_eq!(theta_closed(&spec, FRAC_PI_2).unwrap(), 0.0);
            // -H_{n-1} + (n/2) Σ 1/(k(n-k)) = 0 at S = 1
            let nf = n as f64;
            let s: f64 = (1..n).map(|k| 1.0 / (k * (n - k)) as f64).sum();
            assert!((nf / 2.0 * s - harmonic_number(n as u64 - 1)).abs() < 1e-13);
        }
        for spec in closed_specs() {
            let kd = k_closed(&spec, FRAC_PI_2).unwrap();
            assert!(rel(k_closed(&spec, FRAC_PI_2 - 1e-7).unwrap(), kd) < 1e-6, "{spec}");
            assert!(theta_closed(&spec, FRAC_PI_2 - 1e-7).unwrap() >= 0.0);
        }
    }

    #[test]
    fn theta_near_top_against_quadrature() {
        for spec in closed_specs() {
            let prof = RadialGreenProfile::with_settings(spec, tight()).unwrap();
            for &eps in &[0.05, 0.01, 1e-3] {
                let a = FRAC_PI_2 - eps;
                let tq = theta_quadrature(&prof, a).unwrap();
                let tc = theta_closed(&spec, a).unwrap();
                assert!(rel(tc, tq) < 1e-6, "{spec} eps={eps}: {tc} vs {tq}");
            }
        }
    }

    #[test]
    fn by_parts_forms_agree_with_direct_ones() {
        let specs = [
            ManifoldSpec::sphere(2).unwrap(),
            ManifoldSpec::sphere(3).unwrap(),
            ManifoldSpec::sphere(7).unwrap(),
            ManifoldSpec::real_proj(2).unwrap(),
            ManifoldSpec::real_proj(5).unwrap(),
            ManifoldSpec::complex_proj(3).unwrap(),
            ManifoldSpec::cayley_plane(),
        ];
        for spec in specs {
            let prof = RadialGreenProfile::with_settings(spec, tight()).unwrap();
            for f in [1e-3, 0.01, 0.2, 0.5, 0.8, 0.99, 1.0] {
                let a = f * spec.diameter();
                let (k1, k2) = (k_quadrature(&spec, a, &tight()).unwrap(), k_by_parts(&spec, a, &tight()).unwrap());
                assert!(rel(k1, k2) < 1e-9, "{spec} a={a}: {k1} vs {k2}");
                let (t1, t2) = (theta_quadrature(&prof, a).unwrap(), theta_by_parts(&prof, a).unwrap());
                if f < 1.0 {
                    assert!(rel(t1, t2) < 1e-8, "{spec} a={a}: {t1} vs {t2}");
                } else {
                    assert_eq!((t1, t2), (0.0, 0.0));
                }
            }
        }
    }

    #[test]
    fn s2_kernels_in_closed_form() {
        // S²: V(u)/v(u) = tan(u/2), so K = (1/(V V(a))) ∫_0^a 2π sin r (-2 ln cos(r/2)) dr
        let spec = ManifoldSpec::sphere(2).unwrap();
        let q = tight();
        for &a in &[0.1, 1.0, 2.5, PI] {
            let va = 2.0 * PI * (1.0 - f64::cos(a));
            let want = integrate(|r: f64| 2.0 * PI * r.sin() * -2.0 * (r / 2.0).cos().ln(), 0.0, a, &q).unwrap()
                / (4.0 * PI * va);
            assert!(rel(k_quadrature(&spec, a, &q).unwrap(), want) < 1e-9);
        }
    }

    #[test]
    fn small_radius_asymptotics() {
        let specs = [
            ManifoldSpec::sphere(3).unwrap(),
            ManifoldSpec::sphere(5).unwrap(),
            ManifoldSpec::real_proj(3).unwrap(),
            ManifoldSpec::complex_proj(2).unwrap(),
            ManifoldSpec::quat_proj(1).unwrap(),
            ManifoldSpec::cayley_plane(),
        ];
        for spec in specs {
            let prof = RadialGreenProfile::with_settings(spec, tight()).unwrap();
            let errs = |a: f64| {
                let k = k_quadrature(&spec, a, &tight()).unwrap() / k_leading(&spec, a).unwrap();
                let t = theta_quadrature(&prof, a).unwrap() / theta_leading(&spec, a).unwrap();
                ((k - 1.0).abs(), (t - 1.0).abs())
            };
            let (k2, t2) = errs(1e-2 * spec.diameter());
            let (k3, t3) = errs(1e-3 * spec.diameter());
            assert!(k2 < 0.01 && t2 < 0.02, "{spec}: {k2} {t2}");
            assert!(k3 < k2 && t3 < t2, "{spec}: {k3} {t3}");
        }
    }

    #[test]
    fn kernels_are_positive() {
        for spec in closed_specs() {
            for k in 1..=40 {
                let a = FRAC_PI_2 * k as f64 / 40.0;
                assert!(k_closed(&spec, a).unwrap() > 0.0);
                if k < 40 {
                    assert!(theta_closed(&spec, a).unwrap() > 0.0, "{spec} a={a}");
                }
            }
        }
    }

    #[test]
    fn unsupported_closed_forms() {
        let s3 = ManifoldSpec::sphere(3).unwrap();
        assert!(matches!(k_closed(&s3, 0.5), Err(Error::NoClosedForm { .. })));
        assert!(matches!(theta_closed(&ManifoldSpec::real_proj(3).unwrap(), 0.5), Err(Error::NoClosedForm { .. })));
        assert!(k_quadrature(&s3, 0.0, &tight()).is_err());
        assert!(k_quadrature(&s3, 4.0, &tight()).is_err());
    }

    #[test]
    fn hp_series_low_orders_vanish() {
        // constant and linear coefficients of the y-expansion cancel exactly
        for n in 1..=6u64 {
            let nf = n as f64;
            let m = 2 * n;
            let c: Vec<f64> = (1..m).map(|k| 1.0 / (k * (k + 1) * (m - k)) as f64).collect();
            let s0: f64 = c.iter().sum();
            let s1: f64 = c.iter().zip(1..).map(|(c, k)| c * k as f64).sum();
            let h = harmonic_number(m - 1);
            let f0 = 2.0 * nf * (2.0 * nf + 1.0) * s0 - 2.0 * h - (1.0 + 2.0 * (nf - 1.0));
            let f1 = 2.0 * nf * (2.0 * nf + 1.0) * s1 - 4.0 * nf * h + 1.0 + 2.0 * (nf - 1.0);
            assert!(f0.abs() < 1e-12 && f1.abs() < 1e-12, "n={n}: {f0} {f1}");
        }
    }

    #[test]
    fn ball_average_branches() {
        let spec = ManifoldSpec::complex_proj(2).unwrap();
        let prof = RadialGreenProfile::new(spec).unwrap();
        let a = 0.5;
        let k = k_closed(&spec, a).unwrap();
        for &t in &[0.5, 0.7, 1.2, FRAC_PI_2] {
            let got = ball_average_green(&prof, t, a).unwrap();
            let phi = prof.eval(t).unwrap();
            assert!((got - phi - k).abs() <= 4.0 * f64::EPSILON * (phi.abs() + k));
        }
        let at = ball_average_green(&prof, a, a).unwrap();
        let below = ball_average_green(&prof, a * (1.0 - 1e-10), a).unwrap();
        assert!(rel(below, at) < 1e-8);
        for &t in &[0.01, 0.1, 0.3, 0.49] {
            let got = ball_average_green(&prof, t, a).unwrap();
            assert!(got <= prof.eval(t).unwrap() + k);
        }
        assert!(matches!(ball_average_green(&prof, 0.0, a), Err(Error::Singularity { .. })));
        assert!(ball_average_green(&prof, 0.3, FRAC_PI_2).is_err());
    }

    #[test]
    fn ball_average_inside_against_direct_average() {
        // S²: average of the log-chord Green function over a cap containing p,
        // by a 2-D quadrature in geodesic polar coordinates around p0.
        let spec = ManifoldSpec::sphere(2).unwrap();
        let prof = RadialGreenProfile::with_settings(spec, tight()).unwrap();
        let q = QuadratureSettings::default().with_rel_tol(1e-9);
        let (t, a) = (0.3f64, 0.8f64);
        let g = |cos_d: f64| {
            let chord = (2.0 - 2.0 * cos_d).max(0.0).sqrt();
            -chord.ln() / (2.0 * PI) - 1.0 / (4.0 * PI) + std::f64::consts::LN_2 / (2.0 * PI)
        };
        let ring = |r: f64| {
            // mean over the azimuth of G at polar radius r
            let inner = |psi: f64| g(t.cos() * r.cos() + t.sin() * r.sin() * psi.cos());
            if (r - t).abs() < 1e-12 {
                return f64::NAN;
            }
            integrate(inner, 0.0, PI, &q).unwrap() / PI
        };
        let lo = integrate(|r| 2.0 * PI * r.sin() * ring(r), 0.0, t, &q).unwrap();
        let hi = integrate(|r| 2.0 * PI * r.sin() * ring(r), t, a, &q).unwrap();
        let want = (lo + hi) / (2.0 * PI * (1.0 - a.cos()));
        let got = ball_average_green(&prof, t, a).unwrap();
        assert!((got - want).abs() < 1e-7, "{got} vs {want}");
    }

    #[test]
    fn spherical_mean_identities() {
        let spec = ManifoldSpec::quat_proj(1).unwrap();
        let prof = RadialGreenProfile::with_settings(spec, tight()).unwrap();
        let t = 1.1;
        assert_eq!(spherical_mean(&prof, t, 0.0).unwrap(), prof.eval(t).unwrap());
        let g = spec.geometry();
        for &a in &[0.2, 0.5, 0.9] {
            let h = 1e-5;
            let fd = (spherical_mean(&prof, t, a + h).unwrap() - spherical_mean(&prof, t, a - h).unwrap()) / (2.0 * h);
            let want = g.ball_volume(a) / (g.volume * g.sphere_area(a));
            assert!(rel(fd, want) < 1e-6, "a={a}: {fd} vs {want}");
            let m = |a: f64| g.ball_volume(a) * ball_average_green(&prof, t, a).unwrap();
            let fd2 = (m(a + h) - m(a - h)) / (2.0 * h);
            let want2 = g.sphere_area(a) * spherical_mean(&prof, t, a).unwrap();
            assert!((fd2 - want2).abs() < 1e-6 * want2.abs().max(g.sphere_area(a)), "a={a}: {fd2} vs {want2}");
        }
        assert!(spherical_mean(&prof, 0.5, 0.6).is_err());
    }

    #[test]
    fn disjoint_balls_conditional_positivity() {
        for spec in [ManifoldSpec::sphere(3).unwrap(), ManifoldSpec::complex_proj(2).unwrap(), ManifoldSpec::cayley_plane()] {
            let kern = BallKernels::for_spec(spec).unwrap();
            let g = spec.geometry();
            for &a in &[0.05, 0.2, 0.4] {
                let (k, theta) = kern.get(a).unwrap();
                let self_term = theta - g.ball_complement(a) / g.ball_volume(a) * k;
                let mut t = 2.0 * a;
                while t <= g.diameter {
                    let cross = kern.profile().eval(t).unwrap() + 2.0 * k;
                    assert!(self_term >= cross, "{spec} a={a} t={t}");
                    t += 0.05;
                }
            }
        }
    }

    #[test]
    fn memo_cache() {
        let kern = BallKernels::for_spec(ManifoldSpec::sphere(4).unwrap()).unwrap();
        let a = kern.get(0.3).unwrap();
        let b = kern.get(0.3).unwrap();
        assert_eq!(a, b);
        assert_eq!(kern.cached_len(), 1);
        let v = kern.value(0.3).unwrap();
        assert_eq!(v.method, KernelMethod::Quadrature);
        let kern = std::sync::Arc::new(BallKernels::for_spec(ManifoldSpec::quat_proj(2).unwrap()).unwrap());
        let handles: Vec<_> = (0..4)
            .map(|i| {
                let k = kern.clone();
                std::thread::spawn(move || (0..20).map(|j| k.get(0.05 + 0.07 * ((i + j) % 20) as f64).unwrap()).fold(0.0, |s, (k, t)| s + k + t))
            })
            .collect();
        for h in handles {
            h.join().unwrap();
        }
        assert_eq!(kern.cached_len(), 20);
        assert_eq!(kern.value(0.3).unwrap().method, KernelMethod::ClosedForm);
        assert!(BallKernelValue::asymptotic(ManifoldSpec::sphere(2).unwrap(), 0.1).is_err());
    }
}
