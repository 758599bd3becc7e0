//! Descent on S^2: four points settle on a regular tetrahedron; larger
//! configurations approach the lower bound.
use std::f64::consts::{LN_2, PI};

use greenlab::ball::BallKernels;
use greenlab::energy::{energy, optimize_with, Configuration, EnergyReport, OptimizeSettings};
use greenlab::{ManifoldSpec, RngSeed};

fn main() -> greenlab::Result<()> {
    let spec = ManifoldSpec::sphere(2)?;
    let kern = BallKernels::for_spec(spec)?;
    let prof = kern.profile();

    let out = optimize_with(prof, 4, &OptimizeSettings::new(4000, 1))?;
    let r = (-1.0f64 / 3.0).acos();
    let tetra = 12.0 * (-(2.0 * (0.5 * r).sin()).ln() / (2.0 * PI) - 1.0 / (4.0 * PI) + LN_2 / (2.0 * PI));
    println!("N=4: E = {:.12}, tetrahedron {tetra:.12}, {} moves accepted", energy(&out.config, prof)?, out.accepted);

    for n in [100, 400] {
        let random = EnergyReport::new(&Configuration::random(spec, n, RngSeed(2))?, &kern)?;
        let out = optimize_with(prof, n, &OptimizeSettings::new(30 * n, 2))?;
        let opt = EnergyReport::new(&out.config, &kern)?;
        let scale = n as f64 * (n as f64).ln();
        println!(
            "N={n}: slack/(N log N) random {:.6}, optimized {:.6} (bound {:.6})",
            random.slack / scale,
            opt.slack / scale,
            opt.bound.best_bound
        );
    }
    Ok(())
}
