//! Means of the Green function over balls and spheres.
use greenlab::ball::{ball_average_green, spherical_mean};
use greenlab::{ManifoldSpec, RadialGreenProfile};

fn main() -> greenlab::Result<()> {
    let prof = RadialGreenProfile::new(ManifoldSpec::quat_proj(1)?)?;
    let a = 0.5;
    for t in [0.1, 0.3, 0.5, 0.8, 1.2] {
        println!("t = {t}: mean over B(p0, {a}) = {:.12}, φ(t) = {:.12}", ball_average_green(&prof, t, a)?, prof.eval(t)?);
    }
    for s in [0.0, 0.2, 0.6, 1.0] {
        println!("mean over S(p0, {s}) at t = 1.1: {:.12}", spherical_mean(&prof, 1.1, s)?);
    }
    Ok(())
}
