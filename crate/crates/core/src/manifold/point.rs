use std::ops::{Add, Mul, Neg, Sub};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{Family, ManifoldSpec};
use crate::error::{domain, Error, Result};

/// Seed for reproducible sample streams.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngSeed(pub u64);

impl RngSeed {
    /// Independent generator for `stream`; same `(seed, stream)` gives the
    /// same sequence.
    pub fn rng(self, stream: u64) -> ChaCha8Rng {
        let mut r = ChaCha8Rng::seed_from_u64(self.0);
        r.set_stream(stream);
        r
    }
}

/// Quaternion `w + x i + y j + z k`, stored as `[w, x, y, z]`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Quat(pub [f64; 4]);

impl Quat {
    pub const ONE: Quat = Quat([1.0, 0.0, 0.0, 0.0]);

    pub fn conj(self) -> Self {
        let [w, x, y, z] = self.0;
        Quat([w, -x, -y, -z])
    }

    pub fn norm_sqr(self) -> f64 {
        self.0.iter().map(|c| c * c).sum()
    }

    pub fn norm(self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scale(self, s: f64) -> Self {
        Quat(self.0.map(|c| c * s))
    }
}

impl Mul for Quat {
    type Output = Quat;
    fn mul(self, o: Quat) -> Quat {
        let [a1, b1, c1, d1] = self.0;
        let [a2, b2, c2, d2] = o.0;
        Quat([
            a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
            a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
            a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
            a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
        ])
    }
}

impl Add for Quat {
    type Output = Quat;
    fn add(self, o: Quat) -> Quat {
        Quat([self.0[0] + o.0[0], self.0[1] + o.0[1], self.0[2] + o.0[2], self.0[3] + o.0[3]])
    }
}

impl Sub for Quat {
    type Output = Quat;
    fn sub(self, o: Quat) -> Quat {
        self + (-o)
    }
}

impl Neg for Quat {
    type Output = Quat;
    fn neg(self) -> Quat {
        Quat(self.0.map(|c| -c))
    }
}

/// A point of `S^n`, `RP^n`, `CP^n` or `HP^n`, held as a unit representative
/// in the real embedding of `F^{n+1}` (`k` consecutive reals per coordinate,
/// `k = 1, 2, 4`). Projective points are right-module lines `{p λ : |λ| = 1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    spec: ManifoldSpec,
    coords: Vec<f64>,
}

fn field_dim(spec: &ManifoldSpec, op: &'static str) -> Result<usize> {
    spec.family().field_dim().ok_or(Error::UnsupportedManifold {
        op,
        family: spec.family(),
    })
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|c| c * c).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl Point {
    /// Wraps a unit representative; the norm must be 1 within `1e-12`.
    pub fn new(spec: ManifoldSpec, coords: Vec<f64>) -> Result<Self> {
        let k = field_dim(&spec, "Point::new")?;
        let len = k * (spec.n() + 1);
        if coords.len() != len {
            return Err(domain(
                "Point::new",
                format!("{spec} needs {len} real coordinates, got {}", coords.len()),
            ));
        }
        let nrm = norm(&coords);
        if !((nrm - 1.0).abs() <= 1e-12) {
            return Err(domain("Point::new", format!("representative has norm {nrm}, expected 1")));
        }
        Ok(Self { spec, coords })
    }

    /// Normalizes `coords` before wrapping.
    pub fn from_unnormalized(spec: ManifoldSpec, mut coords: Vec<f64>) -> Result<Self> {
        let nrm = norm(&coords);
        if !(nrm > 0.0) || !nrm.is_finite() {
            return Err(domain("Point::from_unnormalized", "zero or non-finite vector"));
        }
        coords.iter_mut().for_each(|c| *c /= nrm);
        Self::new(spec, coords)
    }

    pub fn spec(&self) -> ManifoldSpec {
        self.spec
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn field_dim(&self) -> usize {
        self.spec.family().field_dim().expect("points never live on OP^2")
    }

    fn quat_coord(&self, i: usize) -> Quat {
        let k = self.field_dim();
        let mut q = [0.0; 4];
        q[..k].copy_from_slice(&self.coords[i * k..(i + 1) * k]);
        Quat(q)
    }

    /// Hermitian product `<p, q> = Σ conj(p_i) q_i` in the base field,
    /// returned as a quaternion (trailing components zero over R and C).
    pub fn hermitian(&self, other: &Point) -> Quat {
        let k = self.field_dim();
        match k {
            1 => Quat([dot(&self.coords, &other.coords), 0.0, 0.0, 0.0]),
            2 => {
                let (mut re, mut im) = (0.0, 0.0);
                for (p, q) in self.coords.chunks_exact(2).zip(other.coords.chunks_exact(2)) {
                    re += p[0] * q[0] + p[1] * q[1];
                    im += p[0] * q[1] - p[1] * q[0];
                }
                Quat([re, im, 0.0, 0.0])
            }
            _ => (0..=self.spec.n()).fold(Quat::default(), |acc, i| {
                acc + self.quat_coord(i).conj() * other.quat_coord(i)
            }),
        }
    }

    /// Representative of this point multiplied on the right by the unit scalar `mu`.
    pub fn right_scaled(&self, mu: Quat) -> Point {
        let k = self.field_dim();
        let mut coords = self.coords.clone();
        for chunk in coords.chunks_exact_mut(k) {
            let mut q = [0.0; 4];
            q[..k].copy_from_slice(chunk);
            let r = Quat(q) * mu;
            chunk.copy_from_slice(&r.0[..k]);
        }
        Point {
            spec: self.spec,
            coords,
        }
    }

    /// Representative of `other` rotated so `<self, other>` is real and
    /// nonnegative. Returns the aligned coordinates and `|<self, other>|`.
    pub(crate) fn aligned(&self, other: &Point) -> (Vec<f64>, f64) {
        let z = self.hermitian(other);
        let m = z.norm();
        if self.spec.family() == Family::Sphere {
            return (other.coords.clone(), z.0[0]);
        }
        if m == 0.0 {
            return (other.coords.clone(), 0.0);
        }
        let mu = z.conj().scale(1.0 / m);
        (other.right_scaled(mu).coords, m)
    }

    /// Riemannian distance `d_R(self, other)`.
    pub fn distance(&self, other: &Point) -> Result<f64> {
        if self.spec != other.spec {
            return Err(Error::SpecMismatch);
        }
        // Evaluate in a canonical order so the result is exactly symmetric.
        let (p, q) = match self.coords.partial_cmp(&other.coords) {
            Some(std::cmp::Ordering::Equal) => return Ok(0.0),
            Some(std::cmp::Ordering::Greater) => (other, self),
            _ => (self, other),
        };
        let (q, c) = p.aligned(q);
        Ok(distance_from_aligned(&p.coords, &q, c))
    }

    /// Removes from `v` its components along the fibre through `self`
    /// (`p` itself, and `p·e` for each imaginary unit `e` of the field).
    pub fn horizontal_projection(&self, v: &mut [f64]) {
        for e in self.vertical_basis() {
            let c = dot(&e, v);
            v.iter_mut().zip(&e).for_each(|(x, ei)| *x -= c * ei);
        }
    }

    fn vertical_basis(&self) -> Vec<Vec<f64>> {
        let k = self.field_dim();
        let units: &[Quat] = match (self.spec.family(), k) {
            (Family::Sphere, _) | (_, 1) => &[Quat::ONE],
            (_, 2) => &[Quat::ONE, Quat([0.0, 1.0, 0.0, 0.0])],
            _ => &[
                Quat::ONE,
                Quat([0.0, 1.0, 0.0, 0.0]),
                Quat([0.0, 0.0, 1.0, 0.0]),
                Quat([0.0, 0.0, 0.0, 1.0]),
            ],
        };
        units.iter().map(|&u| self.right_scaled(u).coords).collect()
    }
}

/// Distance from `p` to an aligned representative `q` with `<p, q> = c >= 0`
/// (sphere: `c` is the plain dot product). Uses the chord for nearby points
/// and a clamped `arccos` elsewhere.
pub(crate) fn distance_from_aligned(p: &[f64], q: &[f64], c: f64) -> f64 {
    if c > 0.5 {
        let chord = p.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        2.0 * (0.5 * chord).min(1.0).asin()
    } else {
        c.clamp(-1.0, 1.0).acos()
    }
}

/// Uniform sample from the normalized Riemannian volume: a standard Gaussian
/// vector over the base field, normalized.
pub fn sample_uniform<R: Rng + ?Sized>(spec: ManifoldSpec, rng: &mut R) -> Result<Point> {
    let k = field_dim(&spec, "sample_uniform")?;
    let len = k * (spec.n() + 1);
    loop {
        let v: Vec<f64> = (0..len).map(|_| rng.sample(StandardNormal)).collect();
        let nrm = norm(&v);
        if nrm > 1e-150 {
            return Point::from_unnormalized(spec, v);
        }
    }
}

/// Point at arclength `t` from `p` along the geodesic with initial direction
/// `direction`. The direction is first projected onto the horizontal space at
/// `p` and normalized.
pub fn geodesic_step(p: &Point, direction: &[f64], t: f64) -> Result<Point> {
    if direction.len() != p.coords.len() {
        return Err(domain("geodesic_step", "direction has the wrong length"));
    }
    let dia = p.spec.diameter();
    if !(t.abs() <= dia * (1.0 + 1e-12)) {
        return Err(domain("geodesic_step", format!("|t| = {} exceeds the diameter {dia}", t.abs())));
    }
    let mut u = direction.to_vec();
    p.horizontal_projection(&mut u);
    let nu = norm(&u);
    if !(nu > 1e-300) {
        return Err(domain("geodesic_step", "direction has no horizontal component"));
    }
    let (s, c) = t.sin_cos();
    let coords: Vec<f64> = p.coords.iter().zip(&u).map(|(pi, ui)| c * pi + s * ui / nu).collect();
    Point::from_unnormalized(p.spec, coords)
}

/// Distance from a fixed point to a uniform random point, drawn from the
/// density `v(r)/V` by inverse CDF on `V(a)/V`. Works on every family
/// including the Cayley plane.
pub fn random_distance<R: Rng + ?Sized>(spec: ManifoldSpec, rng: &mut R) -> f64 {
    let g = spec.geometry();
    let u: f64 = rng.random();
    let (mut lo, mut hi) = (0.0, g.diameter);
    for _ in 0..64 {
        let mid = 0.5 * (lo + hi);
        if g.ball_fraction(mid) < u {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 {
            break;
        }
    }
    0.5 * (lo + hi)
}
