//! The radial Green function on a few manifolds, and the closed form on S^2.
use std::f64::consts::{LN_2, PI};

use greenlab::{ManifoldSpec, RadialGreenProfile};

fn main() -> greenlab::Result<()> {
    let s2 = RadialGreenProfile::new(ManifoldSpec::sphere(2)?)?;
    println!("S^2: C_M = {}", s2.c_m());
    for r in [0.1, 1.0, 2.0, PI] {
        let closed = -(2.0 * (0.5 * r).sin()).ln() / (2.0 * PI) - 1.0 / (4.0 * PI) + LN_2 / (2.0 * PI);
        println!("  φ({r:.4}) = {:+.15}   closed form {closed:+.15}", s2.eval(r)?);
    }

    for spec in [ManifoldSpec::complex_proj(2)?, ManifoldSpec::quat_proj(1)?, ManifoldSpec::cayley_plane()] {
        let p = RadialGreenProfile::shared(spec)?;
        let d = spec.dimension() as i32;
        let r = 1e-3 * spec.diameter();
        // near zero V r^{d-2} φ(r) tends to B_M
        println!(
            "{spec}: C_M = {:.6}, φ(D) = {:.6}, V r^(d-2) φ(r) = {:.6} vs B_M = {:.6}",
            p.c_m(),
            p.eval(spec.diameter())?,
            spec.volume() * r.powi(d - 2) * p.eval(r)?,
            spec.bm_constant()?
        );
    }
    Ok(())
}
