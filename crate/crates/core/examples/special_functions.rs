//! Gamma, unit-sphere volumes, the regularized incomplete beta function and
//! adaptive quadrature.
use greenlab::special::{integrate_with_error, log_gamma, reg_incomplete_beta, vol_unit_sphere};
use greenlab::QuadratureSettings;

fn main() -> greenlab::Result<()> {
    println!("ln Γ(10.5)      = {}", log_gamma(10.5)?);
    for k in [2, 3, 4, 16] {
        println!("{:<15} = {}", format!("|S^{}|", k - 1), vol_unit_sphere(k)?);
    }
    println!("I_0.3(2.5, 4)   = {}", reg_incomplete_beta(0.3, 2.5, 4.0)?);

    let q = QuadratureSettings::default().with_rel_tol(1e-12);
    // ∫_0^1 -ln x dx = 1, with an endpoint singularity
    let (v, err) = integrate_with_error(|x: f64| -x.ln(), 0.0, 1.0, &q)?;
    println!("∫ -ln x         = {v} (error estimate {err:.1e})");
    Ok(())
}
