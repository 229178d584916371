use crate::phase::PhasePoint;
use crate::scalar::Real;

/// `(dx/dt, dp/dt) = (p/m, -m w0^2 x)`.
#[inline]
pub fn harmonic_rhs<T: Real>(point: &PhasePoint<T>, m: T, omega0: T) -> [T; 2] {
    let (x, p) = (point[0], point[1]);
    [p / m, -m * omega0 * omega0 * x]
}

pub fn harmonic_energy<T: Real>(point: &PhasePoint<T>, m: T, omega0: T) -> T {
    let (x, p) = (point[0], point[1]);
    T::lit(0.5) * (p * p / m + m * omega0 * omega0 * x * x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(x: f64, p: f64) -> PhasePoint<f64> {
        PhasePoint::from_array([x, p], 0.0)
    }

    #[test]
    fn unit_oscillator() {
        assert_eq!(harmonic_rhs(&pt(1.0, 0.0), 1.0, 1.0), [0.0, -1.0]);
        assert_eq!(harmonic_rhs(&pt(0.0, 0.0), 1.0, 1.0), [0.0, 0.0]);
    }

    #[test]
    fn mass_and_frequency() {
        assert_eq!(harmonic_rhs(&pt(0.0, 2.0), 2.0, 3.0), [1.0, 0.0]);
        assert_eq!(harmonic_rhs(&pt(1.0, 0.0), 2.0, 3.0), [0.0, -18.0]);
        assert_eq!(harmonic_energy(&pt(1.0, 2.0), 2.0, 3.0), 0.5 * (2.0 + 18.0));
    }
}
