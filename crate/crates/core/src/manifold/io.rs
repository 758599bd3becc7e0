//! Plain-text point files.
//!
//! ```text
//! # manifold=cp n=2
//! 0.1 -0.3 0.5 0.2 0.7 0.33
//! ...
//! ```
//!
//! One point per line, whitespace-separated reals in the real embedding
//! (real coordinates, interleaved re/im pairs, or quaternion 4-tuples).
//! Blank lines and further `#` lines are ignored.

use std::io::{BufRead, Write};

use super::{Family, ManifoldSpec, Point};
use crate::error::{Error, Result};

pub fn header(spec: &ManifoldSpec) -> String {
    format!("# manifold={} n={}", spec.family().short_name(), spec.n())
}

pub fn write_points<W: Write>(mut w: W, spec: &ManifoldSpec, points: &[Point]) -> Result<()> {
    writeln!(w, "{}", header(spec))?;
    for p in points {
        let line: Vec<String> = p.coords().iter().map(|c| format!("{c:.16e}")).collect();
        writeln!(w, "{}", line.join(" "))?;
    }
    Ok(())
}

fn parse_header(line: &str, lineno: usize) -> Result<ManifoldSpec> {
    let perr = |detail: String| Error::Parse { line: lineno, detail };
    let body = line.trim_start_matches('#').trim();
    let mut family = None;
    let mut n = None;
    for tok in body.split_whitespace() {
        if let Some(v) = tok.strip_prefix("manifold=") {
            family = Some(v.parse::<Family>().map_err(|e| perr(e.to_string()))?);
        } else if let Some(v) = tok.strip_prefix("n=") {
            n = Some(v.parse::<usize>().map_err(|e| perr(format!("bad n: {e}")))?);
        }
    }
    match (family, n) {
        (Some(f), Some(n)) => ManifoldSpec::new(f, n).map_err(|e| perr(e.to_string())),
        _ => Err(perr("header must read `# manifold=<family> n=<n>`".into())),
    }
}

/// Reads a point file. Representatives are renormalized; a norm further than
/// `1e-6` from one is rejected.
pub fn read_points<R: BufRead>(r: R) -> Result<(ManifoldSpec, Vec<Point>)> {
    let mut spec = None;
    let mut points = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        let lineno = i + 1;
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        if t.starts_with('#') {
            if spec.is_none() && t.contains("manifold=") {
                spec = Some(parse_header(t, lineno)?);
            }
            continue;
        }
        let spec = spec.ok_or_else(|| Error::Parse {
            line: lineno,
            detail: "coordinates before the `# manifold=` header".into(),
        })?;
        let coords = t
            .split_whitespace()
            .map(|tok| tok.parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::Parse {
                line: lineno,
                detail: e.to_string(),
            })?;
        let nrm = coords.iter().map(|c| c * c).sum::<f64>().sqrt();
        if (nrm - 1.0).abs() > 1e-6 {
            return Err(Error::Parse {
                line: lineno,
                detail: format!("representative norm {nrm} is not 1"),
            });
        }
        let p = Point::from_unnormalized(spec, coords).map_err(|e| Error::Parse {
            line: lineno,
            detail: e.to_string(),
        })?;
        points.push(p);
    }
    let spec = spec.ok_or(Error::Parse {
        line: 0,
        detail: "missing `# manifold=<family> n=<n>` header".into(),
    })?;
    Ok((spec, points))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::{sample_uniform, RngSeed};

    #[test]
    fn write_then_read_is_exact() {
        let spec = ManifoldSpec::quat_proj(2).unwrap();
        let mut rng = RngSeed(1).rng(0);
        let pts: Vec<Point> = (0..5).map(|_| sample_uniform(spec, &mut rng).unwrap()).collect();
        let mut buf = Vec::new();
        write_points(&mut buf, &spec, &pts).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("# manifold=hp n=2\n"));
        let (spec2, pts2) = read_points(&buf[..]).unwrap();
        assert_eq!(spec2, spec);
        for (a, b) in pts.iter().zip(&pts2) {
            for (x, y) in a.coords().iter().zip(b.coords()) {
                assert!((x - y).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn malformed_files() {
        assert!(matches!(read_points(&b"1 0 0\n"[..]), Err(Error::Parse { line: 1, .. })));
        assert!(read_points(&b"# manifold=zz n=2\n"[..]).is_err());
        assert!(read_points(&b"# manifold=s n=2\n1 0\n"[..]).is_err());
        assert!(read_points(&b"# manifold=s n=2\n2 0 0\n"[..]).is_err());
        assert!(read_points(&b"# manifold=op2 n=2\n1 0 0\n"[..]).is_err());
        assert!(read_points(&b"# manifold=s n=2\n1 x 0\n"[..]).is_err());
        let (s, p) = read_points(&b"# manifold=s n=2\n\n0 0 1\n# comment\n1 0 0\n"[..]).unwrap();
        assert_eq!(s, ManifoldSpec::sphere(2).unwrap());
        assert_eq!(p.len(), 2);
    }
}
