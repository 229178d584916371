use crate::scalar::Real;

/// Chirikov standard map `p' = p - K sin x`, `x' = x + p'`, both taken
/// modulo `2 pi` into `[0, 2 pi)`.
#[inline]
pub fn chirikov_step<T: Real>(x: T, p: T, k: T) -> (T, T) {
    let p1 = p - k * x.sin();
    let x1 = x + p1;
    (x1.wrap_two_pi(), p1.wrap_two_pi())
}

/// Preimage under [`chirikov_step`]: `x = x' - p'`, `p = p' + K sin x`.
#[inline]
pub fn chirikov_inverse<T: Real>(x1: T, p1: T, k: T) -> (T, T) {
    let x = (x1 - p1).wrap_two_pi();
    let p = (p1 + k * x.sin()).wrap_two_pi();
    (x, p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::{FRAC_PI_2, PI, TAU};

    #[test]
    fn fixed_and_symmetry_points() {
        assert_eq!(chirikov_step(0.0, 0.0, 1.7), (0.0, 0.0));
        let (x, p) = chirikov_step(PI, 0.0, 1.7);
        assert_relative_eq!(x, PI, epsilon = 1e-15);
        assert!(p.abs() < 1e-15 || (TAU - p).abs() < 1e-15);
    }

    #[test]
    fn hand_evaluated_step() {
        let (x, p) = chirikov_step(FRAC_PI_2, 0.0, 1.0);
        assert_relative_eq!(p, TAU - 1.0, epsilon = 1e-15);
        assert_relative_eq!(x, FRAC_PI_2 - 1.0, epsilon = 1e-15);
        assert_relative_eq!(x, 0.57080, epsilon = 1e-5);
    }

    #[test]
    fn free_rotor() {
        let (x, p) = chirikov_step(1.0, 2.0, 0.0);
        assert_eq!(p, 2.0);
        assert_eq!(x, 3.0);
    }
}
