//! The finite-N lower bound, optimized over the radius, against its leading term.
use std::env;

use greenlab::bounds::{best_finite_bound, optimal_radius_constant};
use greenlab::{Family, ManifoldSpec};

fn main() -> greenlab::Result<()> {
    let args: Vec<String> = env::args().collect();
    let family: Family = args.get(1).map(|s| s.parse()).transpose()?.unwrap_or(Family::ComplexProj);
    let n: usize = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(2);
    let spec = ManifoldSpec::new(family, n)?;
    if spec.dimension() > 2 {
        let c = optimal_radius_constant(spec)?;
        println!("{spec}: C = {:.12}, leading coefficient {:.12}, exponent {:.6}", c.c_opt, c.leading, c.exponent);
    }
    println!("{:>10} {:>24} {:>24} {:>12} {:>12}", "N", "best bound", "leading term", "best a", "asympt. a");
    for points in [10u64, 100, 1000, 10_000, 100_000, 1_000_000] {
        let r = best_finite_bound(spec, points)?;
        println!(
            "{points:>10} {:>24.15e} {:>24.15e} {:>12.6e} {:>12.6e}",
            r.best_bound,
            r.leading_term(),
            r.best_a,
            r.asymptotic_a
        );
    }
    Ok(())
}
