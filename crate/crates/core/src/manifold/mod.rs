//! The five families of compact harmonic manifolds.
//!
//! Everything radial (dimension, diameter, volume, ball volumes, volume
//! density, the Green singularity constant `B_M`) lives on [`ManifoldSpec`]
//! and the precomputed [`RadialGeometry`]. The point model in [`point`] uses
//! unit representatives over R, C or H with distance `arccos|<p,q>|`; the
//! Cayley plane has radial quantities only.

pub mod io;
mod point;

pub use point::{geodesic_step, random_distance, sample_uniform, Point, Quat, RngSeed};
pub(crate) use point::distance_from_aligned;

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::special::{gamma, reg_incomplete_beta, vol_unit_sphere};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Sphere,
    RealProj,
    ComplexProj,
    QuatProj,
    CayleyPlane,
}

impl Family {
    pub const ALL: [Family; 5] = [
        Family::Sphere,
        Family::RealProj,
        Family::ComplexProj,
        Family::QuatProj,
        Family::CayleyPlane,
    ];

    /// Short name used by the CLI and the configuration file header.
    pub fn short_name(self) -> &'static str {
        match self {
            Family::Sphere => "s",
            Family::RealProj => "rp",
            Family::ComplexProj => "cp",
            Family::QuatProj => "hp",
            Family::CayleyPlane => "op2",
        }
    }

    /// Real dimension of the base field (1, 2, 4), or `None` for the Cayley plane.
    pub fn field_dim(self) -> Option<usize> {
        match self {
            Family::Sphere | Family::RealProj => Some(1),
            Family::ComplexProj => Some(2),
            Family::QuatProj => Some(4),
            Family::CayleyPlane => None,
        }
    }

    pub fn is_projective(self) -> bool {
        self != Family::Sphere
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Family::Sphere => "S^n",
            Family::RealProj => "RP^n",
            Family::ComplexProj => "CP^n",
            Family::QuatProj => "HP^n",
            Family::CayleyPlane => "OP^2",
        };
        f.write_str(s)
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "s" | "sphere" => Ok(Family::Sphere),
            "rp" | "real_proj" | "realproj" => Ok(Family::RealProj),
            "cp" | "complex_proj" | "complexproj" => Ok(Family::ComplexProj),
            "hp" | "quat_proj" | "quatproj" => Ok(Family::QuatProj),
            "op2" | "op" | "cayley_plane" | "cayleyplane" => Ok(Family::CayleyPlane),
            other => Err(domain("Family::from_str", format!("unknown family `{other}`"))),
        }
    }
}

/// A harmonic manifold: family plus dimension parameter `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ManifoldSpec {
    family: Family,
    n: usize,
}

impl fmt::Display for ManifoldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family {
            Family::Sphere => write!(f, "S^{}", self.n),
            Family::RealProj => write!(f, "RP^{}", self.n),
            Family::ComplexProj => write!(f, "CP^{}", self.n),
            Family::QuatProj => write!(f, "HP^{}", self.n),
            Family::CayleyPlane => f.write_str("OP^2"),
        }
    }
}

impl ManifoldSpec {
    pub fn new(family: Family, n: usize) -> Result<Self> {
        let ok = match family {
            Family::CayleyPlane => n == 2,
            _ => n >= 1,
        };
        if !ok {
            return Err(domain("ManifoldSpec::new", format!("invalid parameter n = {n} for {family}")));
        }
        Ok(Self { family, n })
    }

    pub fn sphere(n: usize) -> Result<Self> {
        Self::new(Family::Sphere, n)
    }
    pub fn real_proj(n: usize) -> Result<Self> {
        Self::new(Family::RealProj, n)
    }
    pub fn complex_proj(n: usize) -> Result<Self> {
        Self::new(Family::ComplexProj, n)
    }
    pub fn quat_proj(n: usize) -> Result<Self> {
        Self::new(Family::QuatProj, n)
    }
    pub fn cayley_plane() -> Self {
        Self {
            family: Family::CayleyPlane,
            n: 2,
        }
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Real dimension `d`.
    pub fn dimension(&self) -> usize {
        match self.family {
            Family::Sphere | Family::RealProj => self.n,
            Family::ComplexProj => 2 * self.n,
            Family::QuatProj => 4 * self.n,
            Family::CayleyPlane => 16,
        }
    }

    /// Diameter `D`.
    pub fn diameter(&self) -> f64 {
        match self.family {
            Family::Sphere => PI,
            _ => FRAC_PI_2,
        }
    }

    /// Total volume `V`.
    pub fn volume(&self) -> f64 {
        let n = self.n as f64;
        let g = |x: f64| gamma(x).expect("positive gamma argument");
        match self.family {
            Family::Sphere => 2.0 * PI.powf((n + 1.0) / 2.0) / g((n + 1.0) / 2.0),
            Family::RealProj => PI.powf((n + 1.0) / 2.0) / g((n + 1.0) / 2.0),
            Family::ComplexProj => PI.powi(self.n as i32) / g(n + 1.0),
            Family::QuatProj => PI.powi(2 * self.n as i32) / g(2.0 * n + 2.0),
            Family::CayleyPlane => PI.powi(8) / (1320.0 * g(8.0)),
        }
    }

    /// `vol(S^{d-1})`, the factor turning the radial density into `v(r)`.
    pub fn unit_sphere_factor(&self) -> f64 {
        vol_unit_sphere(self.dimension()).expect("d >= 1")
    }

    /// Coefficient `B_M` of the leading singularity `V G ~ B_M r^{2-d}`.
    pub fn bm_constant(&self) -> Result<f64> {
        let d = self.dimension();
        if d <= 2 {
            return Err(Error::UnsupportedDimension {
                op: "bm_constant",
                family: self.family,
                dim: d,
            });
        }
        let n = self.n as f64;
        let g = |x: f64| gamma(x).expect("positive gamma argument");
        Ok(match self.family {
            Family::Sphere => PI.sqrt() * g(n / 2.0) / ((n - 2.0) * g((n + 1.0) / 2.0)),
            Family::RealProj => PI.sqrt() * g(n / 2.0 - 1.0) / (4.0 * g((n + 1.0) / 2.0)),
            Family::ComplexProj => 1.0 / (4.0 * n * (n - 1.0)),
            Family::QuatProj => 1.0 / (8.0 * n * (4.0 * n * n - 1.0)),
            Family::CayleyPlane => 1.0 / 36960.0,
        })
    }

    /// Exponents `(α, β)` of the radial density `sin^α r · cos^β r`.
    pub fn density_exponents(&self) -> (u32, u32) {
        let n = self.n as u32;
        match self.family {
            Family::Sphere | Family::RealProj => (n - 1, 0),
            Family::ComplexProj => (2 * n - 1, 1),
            Family::QuatProj => (4 * n - 1, 3),
            Family::CayleyPlane => (15, 7),
        }
    }

    pub fn geometry(&self) -> RadialGeometry {
        RadialGeometry::new(*self)
    }

    pub fn radial_density(&self, r: f64) -> Result<f64> {
        let r = self.check_radius("radial_density", r)?;
        Ok(self.geometry().density(r))
    }

    pub fn ball_volume(&self, a: f64) -> Result<f64> {
        let a = self.check_radius("ball_volume", a)?;
        Ok(self.geometry().ball_volume(a))
    }

    /// `v(a)`, the `(d-1)`-volume of the geodesic sphere of radius `a`.
    pub fn sphere_area(&self, a: f64) -> Result<f64> {
        let a = self.check_radius("sphere_area", a)?;
        Ok(self.geometry().sphere_area(a))
    }

    pub(crate) fn check_radius(&self, op: &'static str, r: f64) -> Result<f64> {
        let dia = self.diameter();
        if !(r >= 0.0) || r > dia * (1.0 + 4.0 * f64::EPSILON) {
            return Err(domain(op, format!("radius {r} outside [0, {dia}] for {self}")));
        }
        Ok(r.min(dia))
    }
}

/// Cached radial constants of a spec; all methods assume `r ∈ [0, D]`.
#[derive(Debug, Clone, Copy)]
pub struct RadialGeometry {
    pub spec: ManifoldSpec,
    pub dim: usize,
    pub diameter: f64,
    pub volume: f64,
    pub sphere_factor: f64,
    pub alpha: u32,
    pub beta: u32,
}

impl RadialGeometry {
    pub fn new(spec: ManifoldSpec) -> Self {
        let (alpha, beta) = spec.density_exponents();
        Self {
            spec,
            dim: spec.dimension(),
            diameter: spec.diameter(),
            volume: spec.volume(),
            sphere_factor: spec.unit_sphere_factor(),
            alpha,
            beta,
        }
    }

    /// `r^{d-1} Ω(r) = sin^α r cos^β r`.
    pub fn density(&self, r: f64) -> f64 {
        let (s, c) = r.sin_cos();
        let c = if self.beta > 0 { c.max(0.0) } else { c };
        s.powi(self.alpha as i32) * c.powi(self.beta as i32)
    }

    pub fn sphere_area(&self, r: f64) -> f64 {
        self.sphere_factor * self.density(r)
    }

    /// `V(a)` from the closed forms of each family.
    pub fn ball_volume(&self, a: f64) -> f64 {
        let n = self.spec.n as f64;
        let v = self.volume;
        let half_dim = self.dim as f64 / 2.0;
        match self.spec.family {
            Family::Sphere => {
                let s = (a / 2.0).sin().powi(2);
                v * reg_incomplete_beta(s.clamp(0.0, 1.0), half_dim, half_dim).unwrap()
            }
            Family::RealProj => {
                let s = (a / 2.0).sin().powi(2);
                (2.0 * v * reg_incomplete_beta(s.clamp(0.0, 1.0), half_dim, half_dim).unwrap()).min(v)
            }
            Family::ComplexProj => v * a.sin().powi(2 * self.spec.n as i32),
            Family::QuatProj => {
                let c2 = a.cos().powi(2);
                v * (1.0 + 2.0 * n * c2) * a.sin().powi(4 * self.spec.n as i32)
            }
            Family::CayleyPlane => {
                let s2 = a.sin().powi(2);
                let p = 165.0 - 440.0 * s2 + 396.0 * s2 * s2 - 120.0 * s2 * s2 * s2;
                v * p * s2.powi(8)
            }
        }
    }

    /// `V - V(a)`, evaluated without cancellation near `a = D`.
    pub fn ball_complement(&self, a: f64) -> f64 {
        let v = self.volume;
        let half_dim = self.dim as f64 / 2.0;
        match self.spec.family {
            Family::Sphere => {
                let c = (a / 2.0).cos().powi(2);
                v * reg_incomplete_beta(c.clamp(0.0, 1.0), half_dim, half_dim).unwrap()
            }
            _ => {
                // ∫_a^{π/2} sin^α cos^β = ½ B(d/2, (β+1)/2) I_{cos² a}((β+1)/2, d/2)
                let c = a.cos().powi(2);
                let b = (self.beta as f64 + 1.0) / 2.0;
                v * reg_incomplete_beta(c.clamp(0.0, 1.0), b, half_dim).unwrap()
            }
        }
    }

    /// Density at `r = D - eps`, evaluated from `eps` so tiny offsets survive.
    pub fn density_from_top(&self, eps: f64) -> f64 {
        let (s, c) = eps.sin_cos();
        match self.spec.family {
            Family::Sphere => s.powi(self.alpha as i32),
            _ => c.powi(self.alpha as i32) * s.powi(self.beta as i32),
        }
    }

    /// `V - V(D - eps)`, evaluated from `eps`.
    pub fn complement_from_top(&self, eps: f64) -> f64 {
        let half_dim = self.dim as f64 / 2.0;
        match self.spec.family {
            Family::Sphere => {
                let s = (eps / 2.0).sin().powi(2);
                self.volume * reg_incomplete_beta(s.clamp(0.0, 1.0), half_dim, half_dim).unwrap()
            }
            _ => {
                let s = eps.sin().powi(2);
                let b = (self.beta as f64 + 1.0) / 2.0;
                self.volume * reg_incomplete_beta(s.clamp(0.0, 1.0), b, half_dim).unwrap()
            }
        }
    }

    /// `V(a) / V` through the beta-function representation, which stays
    /// accurate for every family including the ones with polynomial closed forms.
    pub fn ball_fraction(&self, a: f64) -> f64 {
        let half_dim = self.dim as f64 / 2.0;
        match self.spec.family {
            Family::Sphere => {
                let s = (a / 2.0).sin().powi(2);
                reg_incomplete_beta(s.clamp(0.0, 1.0), half_dim, half_dim).unwrap()
            }
            _ => {
                let s = a.sin().powi(2);
                let b = (self.beta as f64 + 1.0) / 2.0;
                reg_incomplete_beta(s.clamp(0.0, 1.0), half_dim, b).unwrap()
            }
        }
    }
}
