//! Green energy of explicit point configurations, a descent optimizer, and
//! Monte Carlo moments over uniform random configurations.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ball::BallKernels;
use crate::bounds::{best_finite_bound_with, finite_bound_with, BoundReport};
use crate::error::{domain, Error, Result};
use crate::green::RadialGreenProfile;
use crate::manifold::{distance_from_aligned, geodesic_step, random_distance, sample_uniform, Family, ManifoldSpec, Point, RngSeed};

/// Points closer than this fraction of the diameter count as coincident.
pub const DUPLICATE_GUARD: f64 = 1e-9;

/// Rows of the pair triangle handled by one parallel task.
const ROW_BLOCK: usize = 16;

/// Neumaier compensated sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = CompensatedSum::default();
        iter.into_iter().for_each(|x| s.add(x));
        s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Configuration {
    spec: ManifoldSpec,
    points: Vec<Point>,
    seed: Option<u64>,
}

impl Configuration {
    pub fn new(spec: ManifoldSpec, points: Vec<Point>) -> Result<Self> {
        if points.is_empty() {
            return Err(domain("Configuration::new", "need at least one point"));
        }
        if points.iter().any(|p| p.spec() != spec) {
            return Err(Error::SpecMismatch);
        }
        Ok(Configuration { spec, points, seed: None })
    }

    /// `n` i.i.d. uniform points.
    pub fn random(spec: ManifoldSpec, n: usize, seed: RngSeed) -> Result<Self> {
        let mut rng = seed.rng(0);
        let points = (0..n).map(|_| sample_uniform(spec, &mut rng)).collect::<Result<Vec<_>>>()?;
        Ok(Configuration::new(spec, points)?.with_seed(seed.0))
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn spec(&self) -> ManifoldSpec {
        self.spec
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn into_points(self) -> Vec<Point> {
        self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    /// Smallest pairwise distance with the offending pair.
    pub fn min_distance(&self) -> Result<Option<(usize, usize, f64)>> {
        let mut best: Option<(usize, usize, f64)> = None;
        for i in 0..self.len() {
            for j in i + 1..self.len() {
                let r = self.points[i].distance(&self.points[j])?;
                if best.is_none_or(|b| r < b.2) {
                    best = Some((i, j, r));
                }
            }
        }
        Ok(best)
    }
}

fn row_sum(profile: &RadialGreenProfile, pts: &[Point], i: usize, guard: f64) -> Result<CompensatedSum> {
    let mut s = CompensatedSum::default();
    for (j, q) in pts.iter().enumerate().skip(i + 1) {
        let r = pts[i].distance(q)?;
        if !(r > guard) {
            return Err(Error::Singularity { i, j, distance: r });
        }
        s.add(profile.eval(r)?);
    }
    Ok(s)
}

/// `E = Σ_{i≠j} φ(d(p_i, p_j))`.
///
/// Rows of the pair triangle are split into fixed blocks whose compensated
/// partial sums are combined in block order, so the value does not depend on
/// the number of worker threads.
pub fn energy(config: &Configuration, profile: &RadialGreenProfile) -> Result<f64> {
    if config.spec() != profile.spec() {
        return Err(Error::SpecMismatch);
    }
    let pts = config.points();
    let guard = DUPLICATE_GUARD * config.spec().diameter();
    let blocks: Vec<usize> = (0..pts.len()).step_by(ROW_BLOCK).collect();
    let partial = blocks
        .par_iter()
        .map(|&start| {
            let mut s = CompensatedSum::default();
            for i in start..(start + ROW_BLOCK).min(pts.len()) {
                let r = row_sum(profile, pts, i, guard)?;
                s.add(r.sum);
                s.add(r.comp);
            }
            Ok(s.value())
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(2.0 * partial.into_iter().collect::<CompensatedSum>().value())
}

/// Interaction of point `i` (at position `p`) with all others: `Σ_{j≠i} φ(d(p, p_j))`.
fn point_interaction(profile: &RadialGreenProfile, pts: &[Point], i: usize, p: &Point, guard: f64) -> Option<f64> {
    let mut s = CompensatedSum::default();
    for (j, q) in pts.iter().enumerate() {
        if j == i {
            continue;
        }
        let r = p.distance(q).ok()?;
        if !(r > guard) {
            return None;
        }
        s.add(profile.eval(r).ok()?);
    }
    Some(s.value())
}

/// Negative Riemannian gradient of `Σ_{j≠i} φ(d(p, p_j))` at `p`, in ambient coordinates.
fn descent_direction(profile: &RadialGreenProfile, pts: &[Point], i: usize) -> Result<Vec<f64>> {
    let p = &pts[i];
    let mut dir = vec![0.0; p.coords().len()];
    let vol = profile.geometry().volume;
    for (j, q) in pts.iter().enumerate() {
        if j == i {
            continue;
        }
        let (qa, c) = p.aligned(q);
        let r = distance_from_aligned(p.coords(), &qa, c);
        let tangent: Vec<f64> = qa.iter().zip(p.coords()).map(|(x, y)| x - c * y).collect();
        let len = tangent.iter().map(|t| t * t).sum::<f64>().sqrt();
        if !(len > 0.0) || !(r > 0.0) {
            continue;
        }
        // -∇_p φ(r) = φ'(r) (q - c p) / sin r
        let w = profile.phi_hat_prime(r)? / vol / len;
        dir.iter_mut().zip(&tangent).for_each(|(d, t)| *d += w * t);
    }
    Ok(dir)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizeSettings {
    /// Single-point moves; point `k mod N` moves at iteration `k`.
    pub iterations: usize,
    pub seed: u64,
    /// Initial step as a fraction of the typical spacing `D N^{-1/d}`.
    pub initial_step: f64,
    pub max_halvings: u32,
}

impl OptimizeSettings {
    pub fn new(iterations: usize, seed: u64) -> Self {
        OptimizeSettings {
            iterations,
            seed,
            initial_step: 0.5,
            max_halvings: 40,
        }
    }
}

#[derive(Debug, Clone)]
pub struct OptimizeOutcome {
    pub config: Configuration,
    /// Energy after every accepted move, starting with the initial energy.
    pub history: Vec<f64>,
    pub accepted: usize,
}

/// Cyclic single-point descent with backtracking, from `n` uniform samples.
pub fn optimize_with(profile: &RadialGreenProfile, n: usize, settings: &OptimizeSettings) -> Result<OptimizeOutcome> {
    let spec = profile.spec();
    if spec.family() == Family::CayleyPlane {
        return Err(Error::UnsupportedManifold {
            op: "optimize",
            family: spec.family(),
        });
    }
    if n < 2 {
        return Err(domain("optimize", "need at least two points"));
    }
    let start = Configuration::random(spec, n, RngSeed(settings.seed))?;
    let mut e = energy(&start, profile)?;
    let mut pts = start.into_points();
    let dia = spec.diameter();
    let guard = DUPLICATE_GUARD * dia;
    let spacing = dia * (n as f64).powf(-1.0 / spec.dimension() as f64);
    let mut steps = vec![(settings.initial_step * spacing).min(0.5 * dia); n];
    let mut history = vec![e];
    let mut accepted = 0;

    for it in 0..settings.iterations {
        let i = it % n;
        let dir = descent_direction(profile, &pts, i)?;
        if dir.iter().all(|x| *x == 0.0) {
            continue;
        }
        let Some(old) = point_interaction(profile, &pts, i, &pts[i], guard) else {
            continue;
        };
        let mut t = steps[i];
        let mut moved = false;
        for _ in 0..settings.max_halvings {
            if let Ok(cand) = geodesic_step(&pts[i], &dir, t) {
                if let Some(new) = point_interaction(profile, &pts, i, &cand, guard) {
                    if new < old {
                        pts[i] = cand;
                        e += 2.0 * (new - old);
                        history.push(e);
                        accepted += 1;
                        moved = true;
                        break;
                    }
                }
            }
            t *= 0.5;
        }
        steps[i] = if moved { (2.0 * t).min(0.5 * dia) } else { t };
    }
    let config = Configuration::new(spec, pts)?.with_seed(settings.seed);
    Ok(OptimizeOutcome {
        config,
        history,
        accepted,
    })
}

pub fn optimize(spec: ManifoldSpec, n: usize, iterations: usize, seed: RngSeed) -> Result<Configuration> {
    let profile = RadialGreenProfile::shared(spec)?;
    Ok(optimize_with(&profile, n, &OptimizeSettings::new(iterations, seed.0))?.config)
}

/// Sample mean and standard error of the energy of `n` i.i.d. uniform points.
/// On the Cayley plane each sample sums `n(n-1)` independent radial draws.
pub fn mc_energy_moment(profile: &RadialGreenProfile, n: usize, samples: usize, seed: RngSeed) -> Result<(f64, f64)> {
    if n < 2 || samples < 2 {
        return Err(domain("mc_energy_moment", "need n >= 2 and samples >= 2"));
    }
    let spec = profile.spec();
    let draws = (0..samples)
        .into_par_iter()
        .map(|k| {
            if spec.family() == Family::CayleyPlane {
                let mut rng = seed.rng(k as u64);
                let s = (0..n * (n - 1))
                    .map(|_| profile.eval(random_distance(spec, &mut rng).max(f64::MIN_POSITIVE)))
                    .collect::<Result<Vec<f64>>>()?;
                Ok(s.into_iter().collect::<CompensatedSum>().value())
            } else {
                let mut rng = seed.rng(k as u64);
                let pts = (0..n).map(|_| sample_uniform(spec, &mut rng)).collect::<Result<Vec<_>>>()?;
                energy(&Configuration::new(spec, pts)?, profile)
            }
        })
        .collect::<Result<Vec<f64>>>()?;
    let m = draws.len() as f64;
    let mean = draws.iter().copied().collect::<CompensatedSum>().value() / m;
    let var = draws.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m - 1.0);
    Ok((mean, (var / m).sqrt()))
}

/// Uniform draws of a distance, with the random-number source exposed for tests.
pub fn sample_distances<R: Rng + ?Sized>(spec: ManifoldSpec, count: usize, rng: &mut R) -> Vec<f64> {
    (0..count).map(|_| random_distance(spec, rng)).collect()
}

/// Energy of a configuration next to its optimized lower bound. Construction
/// fails with [`Error::CertificateViolated`] if the energy is below the bound
/// at any probed radius.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    #[serde(rename = "N")]
    pub n_points: usize,
    pub spec: ManifoldSpec,
    pub seed: Option<u64>,
    pub energy: f64,
    pub bound: BoundReport,
    pub slack: f64,
}

impl EnergyReport {
    pub fn new(config: &Configuration, kernels: &BallKernels) -> Result<Self> {
        let e = energy(config, kernels.profile())?;
        let bound = best_finite_bound_with(kernels, config.len() as u64)?;
        let probes = bound
            .radius_grid
            .iter()
            .copied()
            .chain([(bound.best_a, bound.best_bound), (bound.asymptotic_a, bound.asymptotic_bound)]);
        for (a, b) in probes {
            if e < b {
                return Err(Error::CertificateViolated {
                    energy: e,
                    bound: b,
                    radius: a,
                });
            }
        }
        Ok(EnergyReport {
            n_points: config.len(),
            spec: config.spec(),
            seed: config.seed(),
            energy: e,
            slack: e - bound.best_bound,
            bound,
        })
    }
}

/// `E(config) >= bound(a)` at every radius in `radii`; returns the first violation.
pub fn check_certificate(config: &Configuration, kernels: &BallKernels, radii: &[f64]) -> Result<()> {
    let e = energy(config, kernels.profile())?;
    for &a in radii {
        let b = finite_bound_with(kernels, config.len() as u64, a)?;
        if e < b {
            return Err(Error::CertificateViolated {
                energy: e,
                bound: b,
                radius: a,
            });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use std::f64::consts::{LN_2, PI};

    use super::*;
    use crate::manifold::Quat;

    fn s2_closed(r: f64) -> f64 {
        let chord = 2.0 * (0.5 * r).sin();
        (1.0 / chord).ln() / (2.0 * PI) - 1.0 / (4.0 * PI) + LN_2 / (2.0 * PI)
    }

    fn s2() -> ManifoldSpec {
        ManifoldSpec::sphere(2).unwrap()
    }

    #[test]
    fn trivial_cases() {
        let prof = RadialGreenProfile::shared(s2()).unwrap();
        let one = Configuration::random(s2(), 1, RngSeed(1)).unwrap();
        assert_eq!(energy(&one, &prof).unwrap(), 0.0);
        let p = Point::new(s2(), vec![0.0, 0.0, 1.0]).unwrap();
        let q = Point::new(s2(), vec![0.0, 0.0, -1.0]).unwrap();
        let e = energy(&Configuration::new(s2(), vec![p.clone(), q]).unwrap(), &prof).unwrap();
        assert!((e + 1.0 / (2.0 * PI)).abs() < 1e-12, "{e}");
        match energy(&Configuration::new(s2(), vec![p.clone(), p.clone()]).unwrap(), &prof) {
            Err(Error::Singularity { i: 0, j: 1, .. }) => {}
            other => panic!("{other:?}"),
        }
        assert!(Configuration::new(s2(), vec![]).is_err());
        let other = Point::new(ManifoldSpec::sphere(3).unwrap(), vec![1.0, 0.0, 0.0, 0.0]).unwrap();
        assert!(matches!(Configuration::new(s2(), vec![p, other]), Err(Error::SpecMismatch)));
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let s: CompensatedSum = [1e16, 1.0, -1e16, 1.0].into_iter().collect();
        assert_eq!(s.value(), 2.0);
    }

    #[test]
    fn thread_count_does_not_change_energy() {
        let prof = RadialGreenProfile::shared(ManifoldSpec::complex_proj(2).unwrap()).unwrap();
        let c = Configuration::random(prof.spec(), 150, RngSeed(5)).unwrap();
        let run = |t: usize| {
            rayon::ThreadPoolBuilder::new().num_threads(t).build().unwrap().install(|| energy(&c, &prof).unwrap())
        };
        let e1 = run(1);
        assert_eq!(e1.to_bits(), run(3).to_bits());
        assert_eq!(e1.to_bits(), run(8).to_bits());
    }

    #[test]
    fn relabeling_and_isometry_invariance() {
        for spec in [s2(), ManifoldSpec::real_proj(3).unwrap(), ManifoldSpec::complex_proj(2).unwrap(), ManifoldSpec::quat_proj(1).unwrap()] {
            let prof = RadialGreenProfile::shared(spec).unwrap();
            let c = Configuration::random(spec, 20, RngSeed(11)).unwrap();
            let e = energy(&c, &prof).unwrap();
            let mut pts = c.points().to_vec();
            pts.reverse();
            pts.swap(3, 7);
            let e2 = energy(&Configuration::new(spec, pts).unwrap(), &prof).unwrap();
            assert!((e - e2).abs() < 1e-10 * e.abs().max(1.0));
            // a real rotation mixing the first two coordinates, plus per-point phases
            let (s, co) = 0.7f64.sin_cos();
            let moved: Vec<Point> = c
                .points()
                .iter()
                .enumerate()
                .map(|(k, p)| {
                    let mut x = p.coords().to_vec();
                    let f = p.field_dim();
                    for m in 0..f {
                        let (a, b) = (x[m], x[f + m]);
                        x[m] = co * a - s * b;
                        x[f + m] = s * a + co * b;
                    }
                    let q = Point::new(spec, x).unwrap();
                    if spec.family().is_projective() && p.field_dim() > 1 {
                        let th = 0.3 * k as f64;
                        q.right_scaled(Quat([th.cos(), th.sin(), 0.0, 0.0]))
                    } else if spec.family().is_projective() && k % 2 == 1 {
                        q.right_scaled(Quat([-1.0, 0.0, 0.0, 0.0]))
                    } else {
                        q
                    }
                })
                .collect();
            let e3 = energy(&Configuration::new(spec, moved).unwrap(), &prof).unwrap();
            assert!((e - e3).abs() < 1e-10 * e.abs().max(1.0), "{spec}: {e} vs {e3}");
        }
    }

    #[test]
    fn cp1_energy_equals_s2_energy_of_hopf_image() {
        let cp1 = ManifoldSpec::complex_proj(1).unwrap();
        let pc = RadialGreenProfile::shared(cp1).unwrap();
        let ps = RadialGreenProfile::shared(s2()).unwrap();
        for seed in 0..5 {
            let c = Configuration::random(cp1, 10, RngSeed(seed)).unwrap();
            let img: Vec<Point> = c
                .points()
                .iter()
                .map(|p| {
                    let z = p.coords();
                    // conj(z0) z1
                    let re = z[0] * z[2] + z[1] * z[3];
                    let im = z[0] * z[3] - z[1] * z[2];
                    let h = z[0] * z[0] + z[1] * z[1] - z[2] * z[2] - z[3] * z[3];
                    Point::from_unnormalized(s2(), vec![2.0 * re, 2.0 * im, h]).unwrap()
                })
                .collect();
            let ec = energy(&c, &pc).unwrap();
            let es = energy(&Configuration::new(s2(), img).unwrap(), &ps).unwrap();
            assert!((ec - es).abs() < 1e-8 * es.abs().max(1.0), "{ec} vs {es}");
        }
    }

    #[test]
    fn rp2_energy_is_affine_in_lifted_s2_energy() {
        let rp2 = ManifoldSpec::real_proj(2).unwrap();
        let pr = RadialGreenProfile::shared(rp2).unwrap();
        let ps = RadialGreenProfile::shared(s2()).unwrap();
        let pair = |seed: u64| {
            let c = Configuration::random(rp2, 10, RngSeed(seed)).unwrap();
            let mut lift: Vec<Point> = c.points().iter().map(|p| Point::new(s2(), p.coords().to_vec()).unwrap()).collect();
            let neg: Vec<Point> = lift
                .iter()
                .map(|p| Point::new(s2(), p.coords().iter().map(|x| -x).collect()).unwrap())
                .collect();
            lift.extend(neg);
            (energy(&Configuration::new(s2(), lift).unwrap(), &ps).unwrap(), energy(&c, &pr).unwrap())
        };
        let (x0, y0) = pair(100);
        let (x1, y1) = pair(101);
        let slope = (y1 - y0) / (x1 - x0);
        let offset = y0 - slope * x0;
        assert!((slope - 0.5).abs() < 1e-8, "slope {slope}");
        for seed in 0..20 {
            let (x, y) = pair(seed);
            assert!((slope * x + offset - y).abs() < 1e-8 * y.abs().max(1.0));
        }
    }

    #[test]
    fn random_configurations_have_mean_zero() {
        let prof = RadialGreenProfile::shared(s2()).unwrap();
        let (m, se) = mc_energy_moment(&prof, 50, 200, RngSeed(3)).unwrap();
        assert!(m.abs() < 3.0 * se, "{m} ± {se}");
        for spec in [ManifoldSpec::real_proj(3).unwrap(), ManifoldSpec::quat_proj(1).unwrap(), ManifoldSpec::cayley_plane()] {
            let prof = RadialGreenProfile::shared(spec).unwrap();
            let (m, se) = mc_energy_moment(&prof, 10, 400, RngSeed(4)).unwrap();
            assert!(m.abs() < 3.0 * se, "{spec}: {m} ± {se}");
        }
    }

    #[test]
    fn std_err_scales_like_inverse_root() {
        let prof = RadialGreenProfile::shared(ManifoldSpec::sphere(3).unwrap()).unwrap();
        let (_, s1) = mc_energy_moment(&prof, 8, 2000, RngSeed(9)).unwrap();
        let (_, s2) = mc_energy_moment(&prof, 8, 8000, RngSeed(10)).unwrap();
        let ratio = s1 / s2;
        assert!((ratio - 2.0).abs() < 0.3, "{ratio}");
    }

    fn mean_and_se(vals: &[f64]) -> (f64, f64) {
        let m = vals.len() as f64;
        let mean = vals.iter().sum::<f64>() / m;
        let var = vals.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m - 1.0);
        (mean, (var / m).sqrt())
    }

    // phi^2 v ~ r^{3-d}: for d >= 4 the plain estimator has infinite variance
    // (tail index d/(d-2), about 1.14 on OP^2), so its standard error is not
    // meaningful and this check passes or fails depending on the seed.
    #[test]
    #[ignore]
    fn op2_single_pair_mean_is_zero() {
        let prof = RadialGreenProfile::shared(ManifoldSpec::cayley_plane()).unwrap();
        let mut rng = RngSeed(21).rng(0);
        let vals: Vec<f64> = sample_distances(prof.spec(), 1_000_000, &mut rng)
            .into_iter()
            .map(|r| prof.eval(r.max(f64::MIN_POSITIVE)).unwrap())
            .collect();
        let (mean, se) = mean_and_se(&vals);
        assert!(mean.abs() < 3.0 * se, "{mean} ± {se}");
    }

    #[test]
    fn op2_truncated_pair_mean_matches_quadrature() {
        let spec = ManifoldSpec::cayley_plane();
        let prof = RadialGreenProfile::shared(spec).unwrap();
        let g = spec.geometry();
        let mut rng = RngSeed(21).rng(0);
        let rs = sample_distances(spec, 1_000_000, &mut rng);
        for r0 in [0.4, 0.5, 0.6] {
            let vals: Vec<f64> = rs.iter().map(|&r| if r > r0 { prof.eval(r).unwrap() } else { 0.0 }).collect();
            let (mean, se) = mean_and_se(&vals);
            let exact = crate::special::integrate(
                |r| prof.eval(r).unwrap() * g.sphere_area(r) / g.volume,
                r0,
                g.diameter,
                prof.settings(),
            )
            .unwrap();
            assert!((mean - exact).abs() < 3.0 * se, "r0={r0}: {mean} ± {se} vs {exact}");
        }
    }

    #[test]
    fn optimizer_reaches_tetrahedron() {
        let prof = RadialGreenProfile::shared(s2()).unwrap();
        let out = optimize_with(&prof, 4, &OptimizeSettings::new(4000, 1)).unwrap();
        let target = 12.0 * s2_closed((-1.0f64 / 3.0).acos());
        let e = energy(&out.config, &prof).unwrap();
        assert!((e - target).abs() < 1e-6, "{e} vs {target}");
        assert!(out.history.windows(2).all(|w| w[1] <= w[0]));
        assert!(out.accepted > 0);
    }

    #[test]
    fn optimizer_is_deterministic_and_rejects_op2() {
        let spec = ManifoldSpec::complex_proj(2).unwrap();
        let a = optimize(spec, 12, 200, RngSeed(4)).unwrap();
        let b = optimize(spec, 12, 200, RngSeed(4)).unwrap();
        assert_eq!(a, b);
        assert!(optimize(ManifoldSpec::cayley_plane(), 5, 10, RngSeed(0)).is_err());
        assert!(optimize(spec, 1, 10, RngSeed(0)).is_err());
    }

    #[test]
    fn optimized_slack_shrinks() {
        let kern = BallKernels::for_spec(s2()).unwrap();
        for n in [100usize, 400] {
            let rnd = EnergyReport::new(&Configuration::random(s2(), n, RngSeed(2)).unwrap(), &kern).unwrap();
            let out = optimize_with(kern.profile(), n, &OptimizeSettings::new(20 * n, 2)).unwrap();
            let opt = EnergyReport::new(&out.config, &kern).unwrap();
            assert!(opt.slack >= 0.0 && opt.slack < rnd.slack, "N={n}: {} vs {}", opt.slack, rnd.slack);
        }
    }

    #[test]
    fn certificate_holds_on_random_configurations() {
        for spec in [s2(), ManifoldSpec::real_proj(3).unwrap(), ManifoldSpec::complex_proj(2).unwrap()] {
            let kern = BallKernels::for_spec(spec).unwrap();
            for seed in 0..5 {
                let c = Configuration::random(spec, 10, RngSeed(seed)).unwrap();
                let r = EnergyReport::new(&c, &kern).unwrap();
                assert!(r.slack >= 0.0);
                let radii: Vec<f64> = (1..=50).map(|k| spec.diameter() * k as f64 / 50.0).collect();
                check_certificate(&c, &kern, &radii).unwrap();
            }
        }
    }
}
