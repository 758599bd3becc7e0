use crate::error::{domain, Result};

use super::log_beta;

const MAX_ITER: usize = 1000;

/// Regularized incomplete beta function `I_s(a, b) = B_s(a, b) / B(a, b)`.
///
/// Continued fraction (modified Lentz), evaluated directly when
/// `s <= a / (a + b)` and through `1 - I_{1-s}(b, a)` otherwise.
pub fn reg_incomplete_beta(s: f64, a: f64, b: f64) -> Result<f64> {
    if !(a > 0.0) || !(b > 0.0) {
        return Err(domain("reg_incomplete_beta", format!("need a, b > 0 (got {a}, {b})")));
    }
    if !(0.0..=1.0).contains(&s) {
        return Err(domain("reg_incomplete_beta", format!("s = {s} outside [0, 1]")));
    }
    if s == 0.0 {
        return Ok(0.0);
    }
    if s == 1.0 {
        return Ok(1.0);
    }
    if s <= a / (a + b) {
        Ok(continued_fraction(s, a, b))
    } else {
        Ok(1.0 - continued_fraction(1.0 - s, b, a))
    }
}

fn continued_fraction(x: f64, a: f64, b: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let ln_front = a * x.ln() + b * (-x).ln_1p() - log_beta(a, b);
    let front = ln_front.exp() / a;

    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < 1e-16 {
            break;
        }
    }
    front * h
}
