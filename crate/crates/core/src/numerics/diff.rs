//! Richardson-extrapolated central differences.

use crate::error::{Error, Result};

const LEVELS: usize = 4;
/// `√ε` for `f64`.
const SQRT_EPSILON: f64 = 1.490_116_119_384_765_6e-8;

/// Extrapolated derivative together with the last table correction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Derivative {
    pub value: f64,
    pub error: f64,
}

/// Default base step, `1e-3 · max(1, |x|)`.
pub fn default_step(x: f64) -> f64 {
    1e-3 * x.abs().max(1.0)
}

/// Derivative of `f` at `x` from central differences with steps `h0 / 2^k`,
/// `k = 0..4`, combined in a Richardson table.
pub fn central_diff<F: Fn(f64) -> f64>(f: F, x: f64, h0: f64) -> Result<Derivative> {
    central_diff_noisy(f, x, h0, f64::EPSILON)
}

/// [`central_diff`] for an `f` known only to relative accuracy
/// `rel_accuracy`, which sets the noise floor below which an unsettled
/// table is accepted.
pub fn central_diff_noisy<F: Fn(f64) -> f64>(f: F, x: f64, h0: f64, rel_accuracy: f64) -> Result<Derivative> {
    if !(h0 > 0.0) {
        return Err(Error::InvalidParameter { name: "h0", value: h0, reason: "must be positive" });
    }
    let mut table = [[0.0f64; LEVELS]; LEVELS];
    let mut h = h0;
    let mut magnitude = 0.0f64;
    for row in 0..LEVELS {
        let hi = f(x + h);
        let lo = f(x - h);
        if !(hi.is_finite() && lo.is_finite()) {
            return Err(Error::domain("function is not finite near the differentiation point"));
        }
        magnitude = magnitude.max(hi.abs()).max(lo.abs());
        table[row][0] = (hi - lo) / (2.0 * h);
        let mut factor = 1.0;
        for col in 1..=row {
            factor *= 4.0;
            table[row][col] =
                table[row][col - 1] + (table[row][col - 1] - table[row - 1][col - 1]) / (factor - 1.0);
        }
        h *= 0.5;
    }

    let last = LEVELS - 1;
    let error = (table[last][last] - table[last - 1][last - 1]).abs();
    let previous = (table[last - 1][last - 1] - table[last - 2][last - 2]).abs();
    // Roundoff in f amplified by the smallest step.
    let noise = 64.0 * rel_accuracy.max(f64::EPSILON) * magnitude / (2.0 * h);
    let unsettled = error > previous || error > SQRT_EPSILON * magnitude.max(table[last][last].abs());
    if unsettled && error > noise {
        return Err(Error::NoiseDominated { x });
    }
    Ok(Derivative { value: table[last][last], error })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square() {
        let d = central_diff(|t| t * t, 1.0, default_step(1.0)).unwrap();
        assert!((d.value - 2.0).abs() < 1e-12);
    }

    #[test]
    fn sine_at_zero() {
        let d = central_diff(f64::sin, 0.0, default_step(0.0)).unwrap();
        assert!((d.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn constant_is_not_flagged_as_noise() {
        let d = central_diff(|_| 4.0 * core::f64::consts::PI, 0.3, 1e-3).unwrap();
        assert!(d.value.abs() < 1e-10);
    }

    #[test]
    fn rough_function_is_noise_dominated() {
        // Oscillation at the step scale defeats extrapolation.
        let r = central_diff(|t| (t * 4.0e5).sin(), 0.1, 1e-3);
        assert!(matches!(r, Err(Error::NoiseDominated { .. })), "{r:?}");
    }

    #[test]
    fn rejects_bad_step() {
        assert!(central_diff(|t| t, 0.0, 0.0).is_err());
    }
}
