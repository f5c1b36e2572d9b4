//! Safeguarded Newton iteration for monotone scalar equations.

use crate::error::{Error, Result};

/// Root of `g` on `[lo, hi]`, where `g` returns `(value, derivative)` and
/// changes sign across the bracket. Newton steps that leave the current
/// bracket fall back to bisection.
pub fn newton_bracketed<G: Fn(f64) -> (f64, f64)>(
    g: G,
    mut lo: f64,
    mut hi: f64,
    x_tol: f64,
) -> Result<f64> {
    let (g_lo, _) = g(lo);
    let (g_hi, _) = g(hi);
    if g_lo == 0.0 {
        return Ok(lo);
    }
    if g_hi == 0.0 {
        return Ok(hi);
    }
    if g_lo.signum() == g_hi.signum() || !(g_lo.is_finite() && g_hi.is_finite()) {
        return Err(Error::RootNotBracketed { level: f64::NAN });
    }
    let rising = g_hi > 0.0;
    let mut x = 0.5 * (lo + hi);
    for _ in 0..200 {
        let (v, dv) = g(x);
        if v == 0.0 {
            return Ok(x);
        }
        if (v > 0.0) == rising {
            hi = x;
        } else {
            lo = x;
        }
        let newton = x - v / dv;
        let next = if newton.is_finite() && newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
        if (next - x).abs() <= x_tol * x.abs().max(1.0) || hi - lo <= x_tol * x.abs().max(1.0) {
            return Ok(next);
        }
        x = next;
    }
    Ok(x)
}
