//! Radial Green functions.
//!
//! On a two-point homogeneous space the Green function is radial,
//! `G(p, q) = φ(d(p, q))`, with
//!
//! ```text
//! φ(r) = (φ̂(r) + C) / V,     φ̂(r) = ∫_r^D (V - V(s)) / v(s) ds,
//! ```
//!
//! and `C` fixed by the mean-zero condition. [`RadialGreenProfile`] tabulates
//! `φ̂` once per manifold and evaluates it in `O(1)`.

use std::collections::HashMap;
use std::io::Write;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{domain, Error, Result};
use crate::manifold::{ManifoldSpec, Point, RadialGeometry};
use crate::output::sig17;
use crate::special::{integrate, QuadratureSettings};

const NODES: usize = 200;

/// `(V - V(s)) / v(s)`, i.e. `-φ̂'(s)`. Zero at `s = D`.
pub(crate) fn flux_ratio(g: &RadialGeometry, s: f64) -> f64 {
    if s >= g.diameter {
        return 0.0;
    }
    let v = g.sphere_area(s);
    if v == 0.0 {
        return 0.0;
    }
    g.ball_complement(s) / v
}

/// `ln(sin s / s)` without cancellation for small `s`.
fn ln_sinc(s: f64) -> f64 {
    if s < 0.1 {
        let x = s * s;
        -x * (1.0 / 6.0 + x * (1.0 / 180.0 + x * (1.0 / 2835.0 + x * (1.0 / 37800.0 + x / 467775.0))))
    } else {
        (s.sin() / s).ln()
    }
}

/// The leading singular term of `-φ̂'`: `(V/ω) s^{1-d}`.
fn head_integrand(g: &RadialGeometry, s: f64) -> f64 {
    g.volume / g.sphere_factor * s.powi(1 - g.dim as i32)
}

/// `-φ̂'(s) - (V/ω) s^{1-d}`, computed from `s^{d-1}/ρ(s) - 1` so the
/// leading terms never cancel numerically.
fn remainder_integrand(g: &RadialGeometry, s: f64) -> f64 {
    let ln_cos = (-2.0 * (0.5 * s).sin().powi(2)).ln_1p();
    let gm1 = (-(g.alpha as f64) * ln_sinc(s) - g.beta as f64 * ln_cos).exp_m1();
    head_integrand(g, s) * gm1 - g.ball_volume(s) / g.sphere_area(s)
}

/// `∫_r^{r0} (V/ω) s^{1-d} ds`.
fn head_integral(g: &RadialGeometry, r: f64, r0: f64) -> f64 {
    let k = g.volume / g.sphere_factor;
    if g.dim == 2 {
        k * (r0 / r).ln()
    } else {
        let e = 2 - g.dim as i32;
        k * (r.powi(e) - r0.powi(e)) / (g.dim as f64 - 2.0)
    }
}

fn check_dim(spec: &ManifoldSpec, op: &'static str) -> Result<RadialGeometry> {
    let g = spec.geometry();
    if g.dim < 2 {
        return Err(Error::UnsupportedDimension {
            op,
            family: spec.family(),
            dim: g.dim,
        });
    }
    Ok(g)
}

fn check_open_radius(g: &RadialGeometry, op: &'static str, r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(domain(op, format!("radius must be positive, got {r}")));
    }
    g.spec.check_radius(op, r)
}

/// `φ̂'(s) = -(V - V(s)) / v(s)` for `s ∈ (0, D]`; zero at `s = D`.
pub fn phi_hat_prime(spec: &ManifoldSpec, s: f64) -> Result<f64> {
    let g = spec.geometry();
    let s = check_open_radius(&g, "phi_hat_prime", s)?;
    Ok(-flux_ratio(&g, s))
}

/// `φ̂(r)` by direct quadrature, independent of any tabulation. Below
/// `D/100` the power (or log) singularity is integrated in closed form.
pub fn phi_hat(spec: &ManifoldSpec, r: f64, settings: &QuadratureSettings) -> Result<f64> {
    let g = check_dim(spec, "phi_hat")?;
    let r = check_open_radius(&g, "phi_hat", r)?;
    let r0 = g.diameter / 100.0;
    if r >= r0 {
        return integrate(|s| flux_ratio(&g, s), r, g.diameter, settings);
    }
    let top = integrate(|s| flux_ratio(&g, s), r0, g.diameter, settings)?;
    let rem = integrate(|s| remainder_integrand(&g, s), r, r0, settings)?;
    Ok(top + head_integral(&g, r, r0) + rem)
}

/// The normalizing constant `C`, from
/// `C = -(1/V) ∫_0^D φ̂ v dr = -(1/V) ∫_0^D V(r) (V - V(r)) / v(r) dr`
/// (integration by parts; the right-hand integrand is bounded).
pub fn green_constant(spec: &ManifoldSpec, settings: &QuadratureSettings) -> Result<f64> {
    let g = check_dim(spec, "green_constant")?;
    let i = integrate(
        |r| {
            if r <= 0.0 {
                return 0.0;
            }
            g.ball_volume(r) * flux_ratio(&g, r)
        },
        0.0,
        g.diameter,
        settings,
    )?;
    Ok(-i / g.volume)
}

/// Tabulated radial Green function of one manifold.
///
/// On `[r_cut, D]` the regularized profile `ψ = r^{d-2} φ̂` (or
/// `φ̂ + (V/ω) ln r` in dimension two) is held as a Chebyshev series;
/// below `r_cut` the singular head is exact and the remainder is integrated.
#[derive(Debug, Clone)]
pub struct RadialGreenProfile {
    geom: RadialGeometry,
    settings: QuadratureSettings,
    c_m: f64,
    r_cut: f64,
    phi_hat_cut: f64,
    nodes: Vec<f64>,
    node_values: Vec<f64>,
    coeffs: Vec<f64>,
}

impl RadialGreenProfile {
    pub fn new(spec: ManifoldSpec) -> Result<Self> {
        Self::with_settings(spec, QuadratureSettings::default())
    }

    pub fn with_settings(spec: ManifoldSpec, settings: QuadratureSettings) -> Result<Self> {
        let geom = check_dim(&spec, "RadialGreenProfile")?;
        let dia = geom.diameter;
        let r_cut = dia / 100.0;
        let m = NODES - 1;
        // Chebyshev-Lobatto nodes, ordered from D down to r_cut.
        let mut nodes: Vec<f64> = (0..NODES)
            .map(|j| {
                let x = (j as f64 * std::f64::consts::PI / m as f64).cos();
                0.5 * (dia + r_cut) + 0.5 * (dia - r_cut) * x
            })
            .collect();
        nodes[0] = dia;
        nodes[m] = r_cut;
        let mut phi_hat = vec![0.0; NODES];
        for j in 1..NODES {
            let piece = integrate(|s| flux_ratio(&geom, s), nodes[j], nodes[j - 1], &settings)?;
            phi_hat[j] = phi_hat[j - 1] + piece;
        }
        let mut profile = Self {
            geom,
            settings,
            c_m: 0.0,
            r_cut,
            phi_hat_cut: phi_hat[m],
            node_values: phi_hat.clone(),
            coeffs: Vec::new(),
            nodes,
        };
        let psi: Vec<f64> = profile
            .nodes
            .iter()
            .zip(&phi_hat)
            .map(|(&r, &p)| profile.regularize(r, p))
            .collect();
        profile.coeffs = chebyshev_coefficients(&psi);
        profile.c_m = green_constant(&spec, &settings)?;
        Ok(profile)
    }

    /// Process-wide shared profile for `spec`, built on first use.
    pub fn shared(spec: ManifoldSpec) -> Result<Arc<Self>> {
        static CACHE: OnceLock<Mutex<HashMap<ManifoldSpec, Arc<RadialGreenProfile>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        if let Some(p) = cache.lock().unwrap().get(&spec) {
            return Ok(p.clone());
        }
        let p = Arc::new(Self::new(spec)?);
        Ok(cache.lock().unwrap().entry(spec).or_insert(p).clone())
    }

    pub fn spec(&self) -> ManifoldSpec {
        self.geom.spec
    }

    pub fn geometry(&self) -> &RadialGeometry {
        &self.geom
    }

    pub fn settings(&self) -> &QuadratureSettings {
        &self.settings
    }

    /// The normalizing constant `C`.
    pub fn c_m(&self) -> f64 {
        self.c_m
    }

    pub fn r_cut(&self) -> f64 {
        self.r_cut
    }

    /// Table nodes in increasing order.
    pub fn nodes(&self) -> Vec<f64> {
        self.nodes.iter().rev().copied().collect()
    }

    fn regularize(&self, r: f64, phi_hat: f64) -> f64 {
        let g = &self.geom;
        if g.dim == 2 {
            phi_hat + g.volume / g.sphere_factor * r.ln()
        } else {
            phi_hat * r.powi(g.dim as i32 - 2)
        }
    }

    fn unregularize(&self, r: f64, psi: f64) -> f64 {
        let g = &self.geom;
        if g.dim == 2 {
            psi - g.volume / g.sphere_factor * r.ln()
        } else {
            psi / r.powi(g.dim as i32 - 2)
        }
    }

    fn phi_hat_unchecked(&self, r: f64) -> Result<f64> {
        if r >= self.r_cut {
            let (lo, hi) = (self.r_cut, self.geom.diameter);
            let x = ((2.0 * r - lo - hi) / (hi - lo)).clamp(-1.0, 1.0);
            return Ok(self.unregularize(r, clenshaw(&self.coeffs, x)));
        }
        let rem = integrate(|s| remainder_integrand(&self.geom, s), r, self.r_cut, &self.settings)?;
        Ok(self.phi_hat_cut + head_integral(&self.geom, r, self.r_cut) + rem)
    }

    /// `φ̂(r)` for `r ∈ (0, D]`.
    pub fn phi_hat(&self, r: f64) -> Result<f64> {
        let r = check_open_radius(&self.geom, "phi_hat", r)?;
        self.phi_hat_unchecked(r)
    }

    pub fn phi_hat_prime(&self, s: f64) -> Result<f64> {
        let s = check_open_radius(&self.geom, "phi_hat_prime", s)?;
        Ok(-flux_ratio(&self.geom, s))
    }

    /// `φ(r) = (φ̂(r) + C) / V`; a zero distance is a singularity.
    pub fn eval(&self, r: f64) -> Result<f64> {
        if r == 0.0 {
            return Err(Error::Singularity { i: 0, j: 1, distance: 0.0 });
        }
        let r = check_open_radius(&self.geom, "green_eval", r)?;
        Ok((self.phi_hat_unchecked(r)? + self.c_m) / self.geom.volume)
    }

    /// `G(p, q) = φ(d(p, q))`.
    pub fn pair(&self, p: &Point, q: &Point) -> Result<f64> {
        if p.spec() != self.spec() || q.spec() != self.spec() {
            return Err(Error::SpecMismatch);
        }
        let r = p.distance(q)?;
        if r <= 0.0 {
            return Err(Error::Singularity { i: 0, j: 1, distance: r });
        }
        self.eval(r)
    }

    /// `r,phi_hat,phi` at every table node, 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "r,phi_hat,phi")?;
        for (r, ph) in self.nodes.iter().zip(&self.node_values).rev() {
            let phi = (ph + self.c_m) / self.geom.volume;
            writeln!(w, "{},{},{}", sig17(*r), sig17(*ph), sig17(phi))?;
        }
        Ok(())
    }
}


fn chebyshev_coefficients(values: &[f64]) -> Vec<f64> {
    // values at x_j = cos(jπ/m), j = 0..=m
    let m = values.len() - 1;
    let mf = m as f64;
    (0..=m)
        .map(|k| {
            let mut acc = 0.0;
            for (j, v) in values.iter().enumerate() {
                let w = if j == 0 || j == m { 0.5 } else { 1.0 };
                acc += w * v * ((j * k % (2 * m)) as f64 * std::f64::consts::PI / mf).cos();
            }
            let c = 2.0 * acc / mf;
            if k == 0 || k == m {
                0.5 * c
            } else {
                c
            }
        })
        .collect()
}

fn clenshaw(c: &[f64], x: f64) -> f64 {
    let (mut b1, mut b2) = (0.0, 0.0);
    for &ck in c[1..].iter().rev() {
        let b0 = 2.0 * x * b1 - b2 + ck;
        b2 = b1;
        b1 = b0;
    }
    x * b1 - b2 + c[0]
}
