//! K(a) and Θ(a): closed forms against quadrature, and the small-radius terms.
use greenlab::ball::{k_closed, k_leading, k_quadrature, theta_closed, theta_leading, theta_quadrature, BallKernels};
use greenlab::{ManifoldSpec, QuadratureSettings, RadialGreenProfile};

fn main() -> greenlab::Result<()> {
    let q = QuadratureSettings::default().with_rel_tol(1e-12);
    let spec = ManifoldSpec::complex_proj(3)?;
    let prof = RadialGreenProfile::with_settings(spec, q)?;
    println!("{spec}");
    println!("{:>8} {:>22} {:>22} {:>22} {:>22}", "a", "K closed", "K quadrature", "Θ closed", "Θ quadrature");
    for f in [0.01, 0.1, 0.5, 0.9, 0.999] {
        let a = f * spec.diameter();
        println!(
            "{a:>8.5} {:>22.15e} {:>22.15e} {:>22.15e} {:>22.15e}",
            k_closed(&spec, a)?,
            k_quadrature(&spec, a, &q)?,
            theta_closed(&spec, a)?,
            theta_quadrature(&prof, a)?
        );
    }

    let s5 = ManifoldSpec::sphere(5)?;
    let kern = BallKernels::for_spec(s5)?;
    for a in [0.1, 0.01, 0.001] {
        let (k, t) = kern.get(a)?;
        println!("{s5} a={a}: K/leading = {:.8}, Θ/leading = {:.8}", k / k_leading(&s5, a)?, t / theta_leading(&s5, a)?);
    }
    Ok(())
}
