use crate::error::{Error, Result};
use crate::phase::PhasePoint;
use crate::scalar::Real;

/// Semiclassical Dicke model in the large-spin limit.
///
/// `(x, p_x)` are the cavity quadratures, `(y, p_y)` the Holstein-Primakoff
/// spin quadratures and `j` the spin length.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DickeParams<T> {
    pub omega0: T,
    pub omega: T,
    pub lambda: T,
    pub j: T,
}

impl<T: Real> DickeParams<T> {
    pub fn new(omega0: T, omega: T, lambda: T, j: T) -> Self {
        Self {
            omega0,
            omega,
            lambda,
            j,
        }
    }

    /// Superradiant critical coupling `sqrt(omega0 omega) / 2`.
    pub fn lambda_c(&self) -> T {
        (self.omega0 * self.omega).sqrt() * T::lit(0.5)
    }

    pub fn validate(&self) -> Result<()> {
        for (v, what) in [
            (self.omega0, "omega0"),
            (self.omega, "omega"),
            (self.j, "j"),
        ] {
            if !(v > T::zero() && v.is_finite()) {
                return Err(Error::invalid(format!("{what} must be positive, got {v}")));
            }
        }
        if !(self.lambda >= T::zero() && self.lambda.is_finite()) {
            return Err(Error::invalid(format!(
                "lambda must be non-negative, got {}",
                self.lambda
            )));
        }
        Ok(())
    }
}

/// Auxiliary factor `(omega0^2 y^2 + p_y^2 - omega0) / (4 j omega0)`.
#[inline]
pub fn dicke_eta_aux<T: Real>(y: T, py: T, p: &DickeParams<T>) -> T {
    (p.omega0 * p.omega0 * y * y + py * py - p.omega0) / (T::lit(4.0) * p.j * p.omega0)
}

/// Equations of motion `(dx, dp_x, dy, dp_y)`.
pub fn dicke_rhs<T: Real>(point: &PhasePoint<T>, p: &DickeParams<T>) -> Result<[T; 4]> {
    let (x, px, y, py) = (point[0], point[1], point[2], point[3]);
    let one_m = T::one() - dicke_eta_aux(y, py, p);
    if !(one_m > T::lit(1e-12)) {
        if !one_m.is_finite() {
            return Err(Error::StepDiverged {
                trajectory: None,
                time: point.t.to_f64_lossy(),
            });
        }
        return Err(Error::SingularCoordinate {
            trajectory: None,
            time: point.t.to_f64_lossy(),
            what: format!("1 - eta_aux = {one_m}"),
        });
    }
    let r = one_m.sqrt();
    let g = T::lit(2.0) * p.lambda * (p.omega * p.omega0).sqrt();
    let four_j = T::lit(4.0) * p.j;
    let dx = px;
    let dy =
        py * (T::one() - p.lambda / (T::lit(2.0) * p.j) * (p.omega / p.omega0).sqrt() * x * y / r);
    let dpx = -p.omega * p.omega * x - g * y * r;
    let dpy =
        -p.omega0 * p.omega0 * y - g * x * r * (T::one() - p.omega0 * y * y / (four_j * one_m));
    Ok([dx, dpx, dy, dpy])
}

/// Semiclassical energy whose Hamiltonian flow is [`dicke_rhs`].
pub fn dicke_energy<T: Real>(point: &PhasePoint<T>, p: &DickeParams<T>) -> T {
    let (x, px, y, py) = (point[0], point[1], point[2], point[3]);
    let half = T::lit(0.5);
    let r = (T::one() - dicke_eta_aux(y, py, p)).max(T::zero()).sqrt();
    let g = T::lit(2.0) * p.lambda * (p.omega * p.omega0).sqrt();
    -p.j * p.omega0
        + half
            * (p.omega * p.omega * x * x + px * px - p.omega
                + p.omega0 * p.omega0 * y * y
                + py * py
                - p.omega0)
        + g * x * y * r
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn params(lambda: f64, j: f64) -> DickeParams<f64> {
        DickeParams::new(std::f64::consts::FRAC_1_SQRT_2, 3f64.sqrt(), lambda, j)
    }

    fn pt(c: [f64; 4]) -> PhasePoint<f64> {
        PhasePoint::from_array(c, 0.0)
    }

    #[test]
    fn origin_is_fixed() {
        let p = params(0.3, 100.0);
        assert_relative_eq!(
            dicke_eta_aux(0.0, 0.0, &p),
            -1.0 / 400.0,
            max_relative = 1e-15
        );
        assert_eq!(dicke_rhs(&pt([0.0; 4]), &p).unwrap(), [0.0; 4]);
    }

    #[test]
    fn decoupled_limit() {
        let p = params(0.0, 10.0);
        let [dx, dpx, _, _] = dicke_rhs(&pt([1.5, -0.5, 0.7, 0.2]), &p).unwrap();
        assert_eq!(dx, -0.5);
        assert_relative_eq!(dpx, -3.0 * 1.5, max_relative = 1e-15);
    }

    #[test]
    fn large_j_reduces_to_linear_coupling() {
        let p = params(0.4, 1e9);
        let g = 2.0 * p.lambda * (p.omega * p.omega0).sqrt();
        let c = [0.8, -0.3, 1.1, 0.6];
        let f = dicke_rhs(&pt(c), &p).unwrap();
        let lin = [
            c[1],
            -p.omega * p.omega * c[0] - g * c[2],
            c[3],
            -p.omega0 * p.omega0 * c[2] - g * c[0],
        ];
        for i in 0..4 {
            assert!(
                (f[i] - lin[i]).abs() <= 1e-6 * lin[i].abs().max(1e-3),
                "component {i}"
            );
        }
    }

    #[test]
    fn rhs_is_hamiltonian_gradient() {
        let p = params(0.5, 3.0);
        let h = 1e-6;
        let c = [0.4, 0.9, -1.2, 0.5];
        let f = dicke_rhs(&pt(c), &p).unwrap();
        let grad = |i: usize| {
            let mut a = c;
            let mut b = c;
            a[i] += h;
            b[i] -= h;
            (dicke_energy(&pt(a), &p) - dicke_energy(&pt(b), &p)) / (2.0 * h)
        };
        assert_relative_eq!(f[0], grad(1), epsilon = 1e-7);
        assert_relative_eq!(f[1], -grad(0), epsilon = 1e-7);
        assert_relative_eq!(f[2], grad(3), epsilon = 1e-7);
        assert_relative_eq!(f[3], -grad(2), epsilon = 1e-7);
    }

    #[test]
    fn singular_when_eta_aux_reaches_one() {
        let p = params(0.3, 1.0);
        // omega0^2 y^2 = 4 j omega0 + omega0 puts eta_aux at exactly 1.
        let y = ((4.0 * p.omega0 + p.omega0) / (p.omega0 * p.omega0)).sqrt();
        assert!(matches!(
            dicke_rhs(&pt([0.0, 0.0, y * 1.01, 0.0]), &p),
            Err(Error::SingularCoordinate { .. })
        ));
    }

    #[test]
    fn critical_coupling() {
        assert_relative_eq!(
            params(0.0, 1.0).lambda_c(),
            (3f64.sqrt() / 2f64.sqrt()).sqrt() / 2.0
        );
    }
}
