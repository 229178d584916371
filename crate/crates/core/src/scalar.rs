use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point scalar used by every numerical kernel in the crate.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Sum
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal. Every value used by the crate is
    /// representable (possibly rounded) in `f32` and `f64`.
    #[inline(always)]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    #[inline(always)]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    #[inline(always)]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar type")
    }

    /// `x mod 2*pi` folded into `[0, 2*pi)`.
    #[inline]
    fn wrap_two_pi(self) -> Self {
        let period = Self::TAU();
        let r = self % period;
        let r = if r < Self::zero() { r + period } else { r };
        // `r + period` can round up to exactly `period` for tiny negative inputs.
        if r >= period {
            Self::zero()
        } else {
            r
        }
    }

    /// `x` folded into `[-pi, pi)`.
    #[inline]
    fn wrap_pi(self) -> Self {
        let w = (self + Self::PI()).wrap_two_pi() - Self::PI();
        if w >= Self::PI() {
            -Self::PI()
        } else {
            w
        }
    }
}

impl Real for f32 {}
impl Real for f64 {}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wrapping_stays_in_range() {
        for &x in &[
            -1e-18_f64,
            0.0,
            1.0,
            -7.0,
            100.0,
            std::f64::consts::TAU,
            -std::f64::consts::PI,
        ] {
            let w = x.wrap_two_pi();
            assert!((0.0..std::f64::consts::TAU).contains(&w), "{x} -> {w}");
            let v = x.wrap_pi();
            assert!(
                (-std::f64::consts::PI..std::f64::consts::PI).contains(&v),
                "{x} -> {v}"
            );
        }
        assert_eq!(3.0_f64.wrap_pi(), 3.0);
        assert!((4.0_f64.wrap_pi() - (4.0 - std::f64::consts::TAU)).abs() < 1e-15);
    }

    #[test]
    fn literals_round_trip_in_single_precision() {
        assert_eq!(f32::lit(0.25), 0.25_f32);
        assert_eq!(f64::lit(0.1), 0.1);
    }
}
