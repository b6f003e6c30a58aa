//! Principal branch `W0` of the Lambert W function on `[0, inf)`.
//!
//! Two entry points: `lambert_w0(y)` solves `w e^w = y` directly and
//! `lambert_w0_exp(z)` solves `w + ln w = z`, i.e. returns `W0(e^z)` without
//! forming `e^z`. Both run Halley iterations; the linear form is used for
//! `y <= e` and the log form above that.

use std::f64::consts::E;

use crate::error::{Error, Result};

const MAX_HALLEY: usize = 64;
const STEP_TOL: f64 = 1e-15;

/// `W0(y)` for `y >= 0`.
pub fn lambert_w0(y: f64) -> Result<f64> {
    if y.is_nan() || y < 0.0 {
        return Err(Error::Domain(format!("lambert_w0 requires y >= 0, got {y}")));
    }
    if y == f64::INFINITY {
        return Ok(f64::INFINITY);
    }
    if y > E {
        return Ok(halley_log(y.ln()));
    }
    Ok(halley_linear(y))
}

/// `W0(e^z)` for any real `z`.
///
/// Below `z ~ -745` the result underflows to the subnormal range and
/// eventually to `0`, exactly like `e^z`.
pub fn lambert_w0_exp(z: f64) -> f64 {
    if z.is_nan() {
        return f64::NAN;
    }
    if z == f64::INFINITY {
        return f64::INFINITY;
    }
    if z <= 1.0 {
        return halley_linear(z.exp());
    }
    halley_log(z)
}

/// Halley on `w e^w - y`, seeded with `ln(1 + y)`. Intended for `0 <= y <= e`.
fn halley_linear(y: f64) -> f64 {
    if y == 0.0 {
        return 0.0;
    }
    let mut w = y.ln_1p();
    for _ in 0..MAX_HALLEY {
        let ew = w.exp();
        let f = w * ew - y;
        let wp1 = w + 1.0;
        let step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1));
        w -= step;
        if step.abs() <= STEP_TOL * w.abs() {
            break;
        }
    }
    w
}

/// Halley on `w + ln w - z`, seeded with `z - ln z`. Intended for `z > 1`.
fn halley_log(z: f64) -> f64 {
    let mut w = z - z.ln();
    for _ in 0..MAX_HALLEY {
        let h = w + w.ln() - z;
        let d1 = 1.0 + 1.0 / w;
        let d2 = -1.0 / (w * w);
        let step = h / (d1 - h * d2 / (2.0 * d1));
        w -= step;
        if step.abs() <= STEP_TOL * w {
            break;
        }
    }
    w
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Plain Newton on `w e^w - y`, independent of the Halley code path.
    fn newton_reference(y: f64) -> f64 {
        let mut w = if y < 1.0 { y } else { y.ln() };
        for _ in 0..200 {
            let ew = w.exp();
            w -= (w * ew - y) / (ew * (w + 1.0));
        }
        w
    }

    #[test]
    fn spot_values() {
        assert_eq!(lambert_w0(0.0).unwrap(), 0.0);
        assert!((lambert_w0(E).unwrap() - 1.0).abs() <= 1e-15);
        let omega = newton_reference(1.0);
        assert!((omega - 0.567_143_290_409_783_8).abs() < 1e-15);
        assert!((lambert_w0(1.0).unwrap() - omega).abs() <= 1e-15);
    }

    #[test]
    fn log_form_spot_values() {
        assert!((lambert_w0_exp(1.0) - 1.0).abs() <= 1e-15);
        assert!((lambert_w0_exp(0.0) - newton_reference(1.0)).abs() <= 1e-15);
        // fixed point of w = 100 - ln w
        let mut w = 100.0_f64;
        for _ in 0..200 {
            w = 100.0 - w.ln();
        }
        assert!((w - 95.441_486_645_575_8).abs() < 1e-12);
        assert!((lambert_w0_exp(100.0) - w).abs() <= 1e-12);
    }

    #[test]
    fn negative_argument_is_rejected() {
        assert!(matches!(lambert_w0(-0.1), Err(Error::Domain(_))));
        assert!(lambert_w0(f64::NAN).is_err());
    }

    #[test]
    fn extreme_log_arguments() {
        assert_eq!(lambert_w0_exp(f64::NEG_INFINITY), 0.0);
        assert_eq!(lambert_w0_exp(-800.0), 0.0);
        let tiny = lambert_w0_exp(-700.0);
        assert!((tiny - (-700.0f64).exp()).abs() <= 1e-15 * tiny);
        let big = lambert_w0_exp(1e300);
        assert!((big + big.ln() - 1e300).abs() <= 1e-12 * 1e300);
    }

    #[test]
    fn residuals_on_random_samples() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let y: f64 = rng.random_range(0.0..1e6);
            let w = lambert_w0(y).unwrap();
            assert!(w >= 0.0);
            assert!((w * w.exp() - y).abs() <= 1e-12 * y.max(1.0), "y={y}");
            let z: f64 = rng.random_range(-30.0..700.0);
            let w = lambert_w0_exp(z);
            assert!(w > 0.0);
            assert!((w + w.ln() - z).abs() <= 1e-12 * z.abs().max(1.0), "z={z}");
        }
    }

    #[test]
    fn branches_agree_where_both_apply() {
        for &z in &[-20.0, -1.0, 0.5, 1.0, 1.5, 5.0, 50.0, 300.0] {
            let a = lambert_w0_exp(z);
            let b = lambert_w0(f64::exp(z)).unwrap();
            assert!((a - b).abs() <= 4.0 * f64::EPSILON * a.max(1e-300), "z={z}: {a} vs {b}");
        }
    }

    #[test]
    fn monotone_on_grids() {
        let mut prev = -1.0;
        for k in 0..=4000 {
            let w = lambert_w0(k as f64 * 0.25).unwrap();
            assert!(w >= prev);
            prev = w;
        }
        let mut prev = -1.0;
        for k in 0..=7300 {
            let w = lambert_w0_exp(-30.0 + k as f64 * 0.1);
            assert!(w >= prev);
            prev = w;
        }
    }
}
