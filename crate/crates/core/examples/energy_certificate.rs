//! Energy of random configurations next to the certified lower bound.
use greenlab::ball::BallKernels;
use greenlab::energy::{Configuration, EnergyReport};
use greenlab::{ManifoldSpec, RngSeed};

fn main() -> greenlab::Result<()> {
    for spec in [ManifoldSpec::sphere(2)?, ManifoldSpec::real_proj(3)?, ManifoldSpec::complex_proj(2)?] {
        let kern = BallKernels::for_spec(spec)?;
        for n in [10, 100, 500] {
            let c = Configuration::random(spec, n, RngSeed(n as u64))?;
            let r = EnergyReport::new(&c, &kern)?;
            println!(
                "{spec} N={n:>4}: E = {:>14.6}, bound = {:>14.6} (a = {:.4}), slack = {:.6}",
                r.energy, r.bound.best_bound, r.bound.best_a, r.slack
            );
        }
    }
    Ok(())
}
