//! Adaptive Gauss–Kronrod (G10/K21) quadrature with global bisection.
//!
//! Intervals are kept in a max-heap ordered by their local error estimate;
//! the worst one is bisected until the summed error meets
//! `max(rel_tol * |result|, abs_tol)`. Endpoint singularities are left to
//! the callers (the rule never evaluates the endpoints, so integrable
//! singularities there are tolerated but converge slowly).

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{domain, Error, Result};

/// Environment variable overriding the default relative tolerance.
pub const TOL_REL_ENV: &str = "GREENLAB_TOL_REL";

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct QuadratureSettings {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-14,
            max_subdivisions: 2000,
        }
    }
}

impl QuadratureSettings {
    pub fn new(rel_tol: f64, abs_tol: f64, max_subdivisions: usize) -> Result<Self> {
        if !(rel_tol > 0.0) || !(abs_tol > 0.0) || max_subdivisions < 1 {
            return Err(domain(
                "QuadratureSettings::new",
                format!("need rel_tol > 0, abs_tol > 0, max_subdivisions >= 1 (got {rel_tol}, {abs_tol}, {max_subdivisions})"),
            ));
        }
        Ok(Self {
            rel_tol,
            abs_tol,
            max_subdivisions,
        })
    }

    /// Defaults, with `rel_tol` taken from `GREENLAB_TOL_REL` when it parses
    /// as a positive number.
    pub fn from_env() -> Self {
        let mut s = Self::default();
        if let Some(v) = std::env::var(TOL_REL_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<f64>().ok())
            .filter(|v| *v > 0.0 && v.is_finite())
        {
            s.rel_tol = v;
        }
        s
    }

    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_abs_tol(mut self, abs_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self
    }
}

// Kronrod 21-point abscissae (positive half, descending) and weights, with the
// embedded 10-point Gauss weights on the odd-indexed nodes (QUADPACK qk21).
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.000_000_000_000_000_000_000_000_000_000_000,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[derive(Debug, Clone, Copy)]
struct Panel {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
    resabs: f64,
}

impl Panel {
    fn at_roundoff_floor(&self) -> bool {
        let width = self.hi - self.lo;
        let scale = self.lo.abs().max(self.hi.abs()).max(f64::MIN_POSITIVE);
        self.error <= 50.0 * f64::EPSILON * self.resabs || width <= 64.0 * f64::EPSILON * scale
    }
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod21<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> Panel {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = f(center);
    let mut res_k = fc * WGK[10];
    let mut res_g = 0.0;
    let mut resabs = (fc * WGK[10]).abs();
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        res_k += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let value = res_k * half;
    let resabs = resabs * half.abs();
    let raw_err = ((res_k - res_g) * half).abs();
    let error = raw_err.max(50.0 * f64::EPSILON * resabs);
    Panel {
        lo,
        hi,
        value,
        error,
        resabs,
    }
}

/// Integral of `f` over `[lo, hi]` together with the final error estimate.
pub fn integrate_with_error<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    settings: &QuadratureSettings,
) -> Result<(f64, f64)> {
    if !(lo <= hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(domain("integrate", format!("need finite lo <= hi, got [{lo}, {hi}]")));
    }
    if lo == hi {
        return Ok((0.0, 0.0));
    }

    let first = kronrod21(&f, lo, hi);
    let mut total = first.value;
    let mut total_err = first.error;
    let mut heap = BinaryHeap::with_capacity(settings.max_subdivisions + 1);
    heap.push(first);

    let mut subdivisions = 1usize;
    loop {
        if !total.is_finite() || !total_err.is_finite() {
            return Err(Error::QuadratureFailure {
                lo,
                hi,
                estimate: total,
                error_bound: total_err,
            });
        }
        let tol = settings.abs_tol.max(settings.rel_tol * total.abs());
        if total_err <= tol {
            return Ok((total, total_err));
        }
        let worst = match heap.peek() {
            Some(p) => *p,
            None => return Ok((total, total_err)),
        };
        // Nothing left to refine: every remaining error estimate is at the
        // floating-point floor.
        if worst.at_roundoff_floor() {
            return Ok((total, total_err));
        }
        if subdivisions >= settings.max_subdivisions {
            return Err(Error::QuadratureFailure {
                lo,
                hi,
                estimate: total,
                error_bound: total_err,
            });
        }
        heap.pop();
        let mid = 0.5 * (worst.lo + worst.hi);
        let left = kronrod21(&f, worst.lo, mid);
        let right = kronrod21(&f, mid, worst.hi);
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        subdivisions += 1;

        // Periodically resum to shed drift from the running updates.
        if subdivisions.is_multiple_of(64) {
            total = heap.iter().map(|p| p.value).sum();
            total_err = heap.iter().map(|p| p.error).sum();
        }
    }
}

pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    settings: &QuadratureSettings,
) -> Result<f64> {
    integrate_with_error(f, lo, hi, settings).map(|(v, _)| v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn s() -> QuadratureSettings {
        QuadratureSettings::default()
    }

    #[test]
    fn sine_over_half_period() {
        let v = integrate(f64::sin, 0.0, PI, &s()).unwrap();
        assert!((v - 2.0).abs() < 1e-13);
    }

    #[test]
    fn cp2_density_integral() {
        let v = integrate(|t| t.sin().powi(3) * t.cos(), 0.0, PI / 2.0, &s()).unwrap();
        assert!((v - 0.25).abs() < 1e-14);
    }

    #[test]
    fn log_endpoint_singularity() {
        let v = integrate(|t: f64| -t.ln(), 0.0, 1.0, &s()).unwrap();
        assert!((v - 1.0).abs() < 1e-10, "{v}");
    }

    #[test]
    fn exact_on_polynomials_single_panel() {
        // K21 integrates degree-31 polynomials exactly.
        let p = |x: f64| (0..=31).map(|k| (k as f64 + 1.0) * x.powi(k)).sum::<f64>();
        let exact: f64 = (0..=31).map(|k| (k as f64 + 1.0) / (k as f64 + 1.0)).sum();
        let panel = kronrod21(&p, 0.0, 1.0);
        assert!((panel.value - exact).abs() < 1e-12 * exact);
    }

    #[test]
    fn empty_interval_and_bad_bounds() {
        assert_eq!(integrate(|x| x, 1.0, 1.0, &s()).unwrap(), 0.0);
        assert!(matches!(integrate(|x| x, 2.0, 1.0, &s()), Err(Error::Domain { .. })));
    }

    #[test]
    fn non_convergence_reports_estimate() {
        let tight = QuadratureSettings::new(1e-15, 1e-300, 3).unwrap();
        let err = integrate(|t: f64| t.powf(-0.9), 0.0, 1.0, &tight).unwrap_err();
        match err {
            Error::QuadratureFailure {
                estimate,
                error_bound,
                ..
            } => {
                assert!(estimate.is_finite() && estimate > 0.0);
                assert!(error_bound > 0.0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn settings_validation() {
        assert!(QuadratureSettings::new(0.0, 1e-14, 10).is_err());
        assert!(QuadratureSettings::new(1e-10, -1.0, 10).is_err());
        assert!(QuadratureSettings::new(1e-10, 1e-14, 0).is_err());
    }

    #[test]
    fn deterministic() {
        let f = |t: f64| (3.0 * t).cos() / (1.0 + t * t);
        let a = integrate(f, -2.0, 5.0, &s()).unwrap();
        let b = integrate(f, -2.0, 5.0, &s()).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
    }
}
