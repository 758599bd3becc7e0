//! Leading coefficients against the earlier ones on RP^n, CP^n, HP^n and OP^2.
use greenlab::bounds::{compare_table, legacy_2d_constants};
use greenlab::Family;

fn main() -> greenlab::Result<()> {
    for (family, range) in [
        (Family::RealProj, 3..=10),
        (Family::ComplexProj, 2..=10),
        (Family::QuatProj, 1..=6),
        (Family::CayleyPlane, 2..=2),
    ] {
        println!("{family}");
        for row in compare_table(family, range)? {
            println!("  n={:>2}  ours {:.10}  previous {:.10}  ratio {:.6}", row.n, row.ours, row.matzke, row.ratio);
        }
    }
    println!("two-dimensional reference constants:");
    for c in legacy_2d_constants() {
        println!("  {:<16} {:+.10}  {}", c.name, c.value, c.note);
    }
    Ok(())
}
