//! Points on the projective spaces: sampling, distances, geodesic steps and
//! the point-file format.
use greenlab::manifold::io::{read_points, write_points};
use greenlab::manifold::{geodesic_step, sample_uniform};
use greenlab::{ManifoldSpec, RngSeed};

fn main() -> greenlab::Result<()> {
    let mut rng = RngSeed(1).rng(0);
    for spec in [
        ManifoldSpec::sphere(2)?,
        ManifoldSpec::real_proj(3)?,
        ManifoldSpec::complex_proj(2)?,
        ManifoldSpec::quat_proj(1)?,
    ] {
        let p = sample_uniform(spec, &mut rng)?;
        let q = sample_uniform(spec, &mut rng)?;
        let r = p.distance(&q)?;
        println!("{spec}: d = {}, V = {:.6}, D = {:.6}, d(p,q) = {r:.6}", spec.dimension(), spec.volume(), spec.diameter());

        // walk toward the representative of q whose product with p is real and positive
        let z = p.hermitian(&q);
        let qa = q.right_scaled(z.conj().scale(1.0 / z.norm()));
        let dir: Vec<f64> = qa.coords().iter().zip(p.coords()).map(|(a, b)| a - b).collect();
        let mid = geodesic_step(&p, &dir, 0.5 * r)?;
        println!("    d(p, mid) = {:.6}, d(mid, q) = {:.6}", p.distance(&mid)?, mid.distance(&q)?);
    }

    let spec = ManifoldSpec::complex_proj(1)?;
    let pts: Vec<_> = (0..3).map(|_| sample_uniform(spec, &mut rng)).collect::<Result<_, _>>()?;
    let mut buf = Vec::new();
    write_points(&mut buf, &spec, &pts)?;
    print!("{}", String::from_utf8_lossy(&buf));
    let (back, read) = read_points(buf.as_slice())?;
    assert_eq!(back, spec);
    assert_eq!(read, pts);
    Ok(())
}
