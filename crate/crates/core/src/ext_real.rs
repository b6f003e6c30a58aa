//! Extended reals `]-inf, +inf]`, the codomain of convex functions and their
//! conjugates.

use std::fmt;
use std::ops::{Add, Mul};

/// A real number or `+inf`.
///
/// Variant order gives the total order: every finite value is below
/// [`ExtReal::Infinity`]. Finite payloads are never NaN or infinite; use
/// [`ExtReal::from_f64`] to convert raw floats.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub enum ExtReal {
    Finite(f64),
    Infinity,
}

impl ExtReal {
    pub const ZERO: ExtReal = ExtReal::Finite(0.0);

    /// Maps `+inf` to [`ExtReal::Infinity`]. NaN and `-inf` are rejected.
    pub fn from_f64(v: f64) -> Option<ExtReal> {
        if v.is_nan() || v == f64::NEG_INFINITY {
            None
        } else if v == f64::INFINITY {
            Some(ExtReal::Infinity)
        } else {
            Some(ExtReal::Finite(v))
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, ExtReal::Finite(_))
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            ExtReal::Finite(v) => Some(v),
            ExtReal::Infinity => None,
        }
    }

    /// Lossy conversion, `+inf` becomes `f64::INFINITY`.
    pub fn to_f64(self) -> f64 {
        match self {
            ExtReal::Finite(v) => v,
            ExtReal::Infinity => f64::INFINITY,
        }
    }

    /// Multiplication by a strictly positive scalar.
    pub fn scale(self, factor: f64) -> ExtReal {
        debug_assert!(factor > 0.0);
        match self {
            ExtReal::Finite(v) => ExtReal::Finite(v * factor),
            ExtReal::Infinity => ExtReal::Infinity,
        }
    }

    pub fn max(self, other: ExtReal) -> ExtReal {
        if self >= other {
            self
        } else {
            other
        }
    }
}

impl From<f64> for ExtReal {
    fn from(v: f64) -> Self {
        ExtReal::Finite(v)
    }
}

impl Add for ExtReal {
    type Output = ExtReal;

    fn add(self, rhs: ExtReal) -> ExtReal {
        match (self, rhs) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => ExtReal::Finite(a + b),
            _ => ExtReal::Infinity,
        }
    }
}

impl Add<f64> for ExtReal {
    type Output = ExtReal;

    fn add(self, rhs: f64) -> ExtReal {
        self + ExtReal::Finite(rhs)
    }
}

impl Add<ExtReal> for f64 {
    type Output = ExtReal;

    fn add(self, rhs: ExtReal) -> ExtReal {
        ExtReal::Finite(self) + rhs
    }
}

impl Mul<ExtReal> for f64 {
    type Output = ExtReal;

    /// Positive scaling; see [`ExtReal::scale`].
    fn mul(self, rhs: ExtReal) -> ExtReal {
        rhs.scale(self)
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::Finite(v) => write!(f, "{v}"),
            ExtReal::Infinity => f.write_str("inf"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordering_places_infinity_last() {
        assert!(ExtReal::Finite(1e308) < ExtReal::Infinity);
        assert!(ExtReal::Finite(-3.0) < ExtReal::Finite(2.0));
        assert!(ExtReal::Infinity <= ExtReal::Infinity);
        assert!(!(ExtReal::Infinity <= ExtReal::ZERO));
    }

    #[test]
    fn addition_absorbs_infinity() {
        assert_eq!(ExtReal::Finite(-1e300) + ExtReal::Infinity, ExtReal::Infinity);
        assert_eq!(2.0 + ExtReal::Finite(3.0), ExtReal::Finite(5.0));
        assert_eq!(0.5 * ExtReal::Infinity, ExtReal::Infinity);
    }

    #[test]
    fn from_f64_rejects_nan() {
        assert_eq!(ExtReal::from_f64(f64::NAN), None);
        assert_eq!(ExtReal::from_f64(f64::NEG_INFINITY), None);
        assert_eq!(ExtReal::from_f64(f64::INFINITY), Some(ExtReal::Infinity));
    }
}
