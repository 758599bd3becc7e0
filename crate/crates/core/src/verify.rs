//! Self-check suite behind `greenlab verify`: each check exercises one
//! property of the library end to end and reports pass/fail with a detail line.

use std::f64::consts::{LN_2, PI};
use std::time::Instant;

use serde::Serialize;

use crate::ball::{
    ball_average_green, k_closed, k_leading, k_quadrature, spherical_mean, theta_closed, theta_leading, theta_quadrature,
    BallKernels,
};
use crate::bounds::{
    best_finite_bound_with, closed_leading_coefficient, compare_table, legacy_2d_constants, matzke_coefficient,
    optimal_radius_constant, BoundReport,
};
use crate::energy::{energy, optimize_with, Configuration, OptimizeSettings};
use crate::green::RadialGreenProfile;
use crate::manifold::{Family, ManifoldSpec, RngSeed};
use crate::special::{integrate, QuadratureSettings};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Quick,
    Full,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

type Outcome = std::result::Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn e<T>(r: crate::Result<T>) -> std::result::Result<T, String> {
    r.map_err(|e| e.to_string())
}

pub fn min_specs() -> Vec<ManifoldSpec> {
    vec![
        ManifoldSpec::sphere(3).unwrap(),
        ManifoldSpec::real_proj(3).unwrap(),
        ManifoldSpec::complex_proj(2).unwrap(),
        ManifoldSpec::quat_proj(1).unwrap(),
        ManifoldSpec::cayley_plane(),
    ]
}

fn tight() -> QuadratureSettings {
    QuadratureSettings::default().with_rel_tol(1e-12)
}

fn coefficient_closure(_: Mode) -> Outcome {
    let mut specs = Vec::new();
    specs.extend((2..=10).map(|n| ManifoldSpec::complex_proj(n).unwrap()));
    specs.extend((1..=5).map(|n| ManifoldSpec::quat_proj(n).unwrap()));
    specs.extend((3..=10).map(|n| ManifoldSpec::real_proj(n).unwrap()));
    specs.extend((3..=10).map(|n| ManifoldSpec::sphere(n).unwrap()));
    specs.push(ManifoldSpec::cayley_plane());
    let mut worst = 0.0f64;
    for spec in &specs {
        let co = e(optimal_radius_constant(*spec))?;
        let closed = e(closed_leading_coefficient(*spec))? / spec.volume();
        let r = rel(co.leading, closed);
        worst = worst.max(r);
        ensure(r <= 1e-12, || format!("{spec}: pipeline {} vs closed {closed}", co.leading))?;
    }
    Ok(format!("{} manifolds, worst relative error {worst:.1e}", specs.len()))
}

fn reference_numerals(_: Mode) -> Outcome {
    let trunc4 = |x: f64| (x * 1e4).trunc() / 1e4;
    let op = ManifoldSpec::cayley_plane();
    let ours = e(optimal_radius_constant(op))?.leading * op.volume();
    let matzke = e(matzke_coefficient(op))?;
    let consts = legacy_2d_constants();
    let get = |n: &str| consts.iter().find(|c| c.name == n).map(|c| c.value).unwrap_or(f64::NAN);
    ensure(trunc4(ours) == 0.0335 && trunc4(matzke) == 0.04, || format!("OP^2: {ours} vs {matzke}"))?;
    ensure(trunc4(get("c_bhs")) == -0.0556, || format!("C_BHS {}", get("c_bhs")))?;
    ensure(trunc4(get("lauritsen")) == -0.0568, || format!("lauritsen {}", get("lauritsen")))?;
    Ok(format!("OP^2 {ours:.6} vs {matzke:.6}; C_BHS {:.6}; log2-3/4 {:.6}", get("c_bhs"), get("lauritsen")))
}

fn closed_forms(mode: Mode) -> Outcome {
    let mut specs = vec![
        ManifoldSpec::complex_proj(1).unwrap(),
        ManifoldSpec::complex_proj(2).unwrap(),
        ManifoldSpec::quat_proj(1).unwrap(),
        ManifoldSpec::cayley_plane(),
    ];
    let mut fracs = vec![0.1, 0.5, 0.99];
    if mode == Mode::Full {
        specs.extend([ManifoldSpec::complex_proj(5).unwrap(), ManifoldSpec::quat_proj(3).unwrap()]);
        fracs.extend([0.02, 0.3, 0.8, 0.9999]);
    }
    let mut worst = 0.0f64;
    let mut count = 0;
    for spec in &specs {
        let prof = e(RadialGreenProfile::with_settings(*spec, tight()))?;
        for &f in &fracs {
            let a = f * spec.diameter();
            let (kc, kq) = (e(k_closed(spec, a))?, e(k_quadrature(spec, a, &tight()))?);
            let (tc, tq) = (e(theta_closed(spec, a))?, e(theta_quadrature(&prof, a))?);
            let r = rel(kc, kq).max(rel(tc, tq));
            worst = worst.max(r);
            count += 1;
            ensure(r <= 1e-6, || format!("{spec} a={a}: K {kc} vs {kq}, Θ {tc} vs {tq}"))?;
        }
    }
    Ok(format!("{count} (manifold, radius) pairs, worst relative error {worst:.1e}"))
}

fn green_properties(mode: Mode) -> Outcome {
    let q = tight();
    let specs = if mode == Mode::Full {
        min_specs()
    } else {
        vec![ManifoldSpec::sphere(3).unwrap(), ManifoldSpec::complex_proj(2).unwrap()]
    };
    let mut worst_mean = 0.0f64;
    for spec in &specs {
        let p = e(RadialGreenProfile::shared(*spec))?;
        let g = spec.geometry();
        let lo = e(integrate(|r| g.sphere_area(r) * p.eval(r).unwrap(), 0.0, p.r_cut(), &q))?;
        let hi = e(integrate(|r| g.sphere_area(r) * p.eval(r).unwrap(), p.r_cut(), g.diameter, &q))?;
        worst_mean = worst_mean.max((lo + hi).abs());
        ensure((lo + hi).abs() < 1e-8, || format!("{spec}: ∫φv = {}", lo + hi))?;
        let r = 1e-3 * g.diameter;
        let head = g.volume * r.powi(g.dim as i32 - 2) * e(p.eval(r))?;
        let bm = e(spec.bm_constant())?;
        ensure(rel(head, bm) < 0.02, || format!("{spec}: V r^(d-2) φ = {head} vs B_M {bm}"))?;
    }
    let s2 = e(RadialGreenProfile::shared(ManifoldSpec::sphere(2).unwrap()))?;
    let mut worst_s2 = 0.0f64;
    for k in 1..=50 {
        let r = PI * k as f64 / 50.5;
        let want = -(2.0 * (0.5 * r).sin()).ln() / (2.0 * PI) - 1.0 / (4.0 * PI) + LN_2 / (2.0 * PI);
        let err = (e(s2.eval(r))? - want).abs();
        worst_s2 = worst_s2.max(err);
    }
    ensure(worst_s2 < 1e-8, || format!("S^2 profile off by {worst_s2}"))?;
    Ok(format!("mean ≤ {worst_mean:.1e}, S^2 closed form ≤ {worst_s2:.1e}"))
}

fn small_radius(mode: Mode) -> Outcome {
    let specs = if mode == Mode::Full {
        min_specs()
    } else {
        vec![ManifoldSpec::sphere(3).unwrap(), ManifoldSpec::quat_proj(1).unwrap()]
    };
    for spec in &specs {
        let prof = e(RadialGreenProfile::with_settings(*spec, tight()))?;
        let g = spec.geometry();
        let d = g.dim as f64;
        let errs = |a: f64| -> std::result::Result<[f64; 4], String> {
            Ok([
                (g.ball_volume(a) / (g.sphere_factor * a.powf(d) / d) - 1.0).abs(),
                (g.sphere_area(a) / (g.sphere_factor * a.powf(d - 1.0)) - 1.0).abs(),
                (e(k_quadrature(spec, a, &tight()))? / e(k_leading(spec, a))? - 1.0).abs(),
                (e(theta_quadrature(&prof, a))? / e(theta_leading(spec, a))? - 1.0).abs(),
            ])
        };
        let e2 = errs(1e-2 * g.diameter)?;
        let e3 = errs(1e-3 * g.diameter)?;
        let tol = [0.01, 0.01, 0.01, 0.02];
        for i in 0..4 {
            ensure(e2[i] < tol[i] && e3[i] < e2[i], || format!("{spec}: quantity {i}: {} then {}", e2[i], e3[i]))?;
        }
    }
    Ok(format!("V(a), v(a), K, Θ ratios on {} manifolds", specs.len()))
}

fn ball_averages(mode: Mode) -> Outcome {
    let spec = ManifoldSpec::sphere(2).unwrap();
    let prof = e(RadialGreenProfile::with_settings(spec, tight()))?;
    let (t, a) = (1.0f64, 0.3f64);
    let exact = e(ball_average_green(&prof, t, a))?;
    let k = e(k_quadrature(&spec, a, &tight()))?;
    ensure((exact - e(prof.eval(t))? - k).abs() < 1e-12, || "outer branch differs from φ(t) + K(a)".into())?;
    // Monte Carlo over the cap B(north, a); p at polar angle t.
    let samples = if mode == Mode::Full { 1_000_000 } else { 100_000 };
    let mut rng = RngSeed(17).rng(0);
    let (st, ct) = t.sin_cos();
    let vals: Vec<f64> = (0..samples)
        .map(|_| {
            use rand::Rng;
            let z = 1.0 - rng.random::<f64>() * (1.0 - a.cos());
            let psi = 2.0 * PI * rng.random::<f64>();
            let rho = (1.0 - z * z).max(0.0).sqrt();
            let c = (rho * psi.cos() * st + z * ct).clamp(-1.0, 1.0);
            prof.eval(c.acos()).unwrap()
        })
        .collect();
    let m = vals.len() as f64;
    let mean = vals.iter().sum::<f64>() / m;
    let se = (vals.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m - 1.0) / m).sqrt();
    ensure((mean - exact).abs() < 3.0 * se, || format!("MC {mean} ± {se} vs {exact}"))?;
    // d/da of the spherical mean is V(a)/(V v(a)).
    let hp = ManifoldSpec::quat_proj(1).unwrap();
    let ph = e(RadialGreenProfile::with_settings(hp, tight()))?;
    let g = hp.geometry();
    let h = 1e-5;
    for &a in &[0.2, 0.5, 0.9] {
        let fd = (e(spherical_mean(&ph, 1.1, a + h))? - e(spherical_mean(&ph, 1.1, a - h))?) / (2.0 * h);
        let want = g.ball_volume(a) / (g.volume * g.sphere_area(a));
        ensure(rel(fd, want) < 1e-6, || format!("spherical mean derivative at a={a}: {fd} vs {want}"))?;
    }
    Ok(format!("MC {mean:.6} ± {se:.1e} vs {exact:.6} ({samples} samples)"))
}

fn certificate(mode: Mode) -> Outcome {
    let configs = if mode == Mode::Full { 100 } else { 5 };
    let specs = [
        ManifoldSpec::sphere(2).unwrap(),
        ManifoldSpec::real_proj(3).unwrap(),
        ManifoldSpec::complex_proj(2).unwrap(),
    ];
    let mut min_slack = f64::INFINITY;
    for spec in specs {
        let kern = e(BallKernels::for_spec(spec))?;
        for n in [10u64, 100] {
            let report: BoundReport = e(best_finite_bound_with(&kern, n))?;
            for seed in 0..configs {
                let c = e(Configuration::random(spec, n as usize, RngSeed(seed)))?;
                let en = e(energy(&c, kern.profile()))?;
                for &(a, b) in report.radius_grid.iter().chain([(report.best_a, report.best_bound)].iter()) {
                    ensure(en >= b, || format!("{spec} N={n} seed={seed}: E={en} < bound {b} at a={a}"))?;
                }
                min_slack = min_slack.min(en - report.best_bound);
            }
        }
    }
    Ok(format!("{} configurations, smallest slack {min_slack:.3e}", 6 * configs))
}

fn s2_window(mode: Mode) -> Outcome {
    let n = if mode == Mode::Full { 10_000u64 } else { 1000 };
    let kern = e(BallKernels::for_spec(ManifoldSpec::sphere(2).unwrap()))?;
    let r = e(best_finite_bound_with(&kern, n))?;
    let nf = n as f64;
    let target = -(nf / (4.0 * PI)) * nf.ln() - nf / (8.0 * PI);
    let ratio = r.best_bound / target;
    ensure((0.9..=1.1).contains(&ratio), || format!("ratio {ratio}"))?;
    Ok(format!("N={n}: bound/target = {ratio:.6}"))
}

fn comparison_rows(_: Mode) -> Outcome {
    let mut rows = 0;
    for (family, range) in [
        (Family::RealProj, 3..=60),
        (Family::ComplexProj, 2..=60),
        (Family::QuatProj, 1..=30),
    ] {
        for row in e(compare_table(family, range))? {
            rows += 1;
            ensure(row.ours.abs() < row.matzke.abs(), || format!("{family} n={}: {} vs {}", row.n, row.ours, row.matzke))?;
        }
    }
    Ok(format!("{rows} rows, ours sharper on all"))
}

fn tetrahedron(_: Mode) -> Outcome {
    let spec = ManifoldSpec::sphere(2).unwrap();
    let prof = e(RadialGreenProfile::shared(spec))?;
    let out = e(optimize_with(&prof, 4, &OptimizeSettings::new(4000, 1)))?;
    let got = e(energy(&out.config, &prof))?;
    let r = (-1.0f64 / 3.0).acos();
    let want = 12.0 * (-(2.0 * (0.5 * r).sin()).ln() / (2.0 * PI) - 1.0 / (4.0 * PI) + LN_2 / (2.0 * PI));
    ensure((got - want).abs() < 1e-6, || format!("{got} vs {want}"))?;
    Ok(format!("E = {got:.12} (target {want:.12})"))
}

type Check = (&'static str, fn(Mode) -> Outcome);

const CHECKS: [Check; 10] = [
    ("coefficient_closure", coefficient_closure),
    ("reference_numerals", reference_numerals),
    ("closed_forms_vs_quadrature", closed_forms),
    ("green_properties", green_properties),
    ("small_radius_asymptotics", small_radius),
    ("ball_averages", ball_averages),
    ("bound_certificate", certificate),
    ("s2_log_window", s2_window),
    ("comparison_rows", comparison_rows),
    ("optimizer_tetrahedron", tetrahedron),
];

pub fn check_names() -> Vec<&'static str> {
    CHECKS.iter().map(|c| c.0).collect()
}

pub fn run_suite(mode: Mode) -> Vec<CheckResult> {
    CHECKS
        .iter()
        .map(|&(name, f)| {
            let t0 = Instant::now();
            let out = std::panic::catch_unwind(|| f(mode)).unwrap_or_else(|_| Err("panicked".into()));
            let (passed, detail) = match out {
                Ok(d) => (true, d),
                Err(d) => (false, d),
            };
            CheckResult {
                name,
                passed,
                detail,
                seconds: t0.elapsed().as_secs_f64(),
            }
        })
        .collect()
}

pub fn format_table(results: &[CheckResult]) -> String {
    let width = results.iter().map(|r| r.name.len()).max().unwrap_or(0);
    let mut s = String::new();
    for r in results {
        s.push_str(&format!(
            "{:<width$}  {}  {:>7.2}s  {}\n",
            r.name,
            if r.passed { "PASS" } else { "FAIL" },
            r.seconds,
            r.detail
        ));
    }
    s
}
