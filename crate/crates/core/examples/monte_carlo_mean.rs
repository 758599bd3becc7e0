//! The expected energy of uniform random points is zero.
use greenlab::energy::mc_energy_moment;
use greenlab::{ManifoldSpec, RadialGreenProfile, RngSeed};

fn main() -> greenlab::Result<()> {
    for spec in [ManifoldSpec::sphere(2)?, ManifoldSpec::sphere(3)?, ManifoldSpec::complex_proj(2)?] {
        let prof = RadialGreenProfile::shared(spec)?;
        let (mean, se) = mc_energy_moment(&prof, 20, 2000, RngSeed(5))?;
        println!("{spec}: E = {mean:+.6} ± {se:.6}");
    }
    Ok(())
}
