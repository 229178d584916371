use crate::error::{Error, Result};
use crate::phase::{Ensemble, PhasePoint, StreamDomain, TrajectoryRng};
use crate::scalar::Real;

/// Initial phase-space ensembles.
///
/// The line ensembles are deterministic: point `i` of `N` sits at the
/// midpoint of the `i`-th of `N` equal cells. Gaussian ensembles draw from
/// the per-trajectory initial-condition streams.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum InitialCondition<T> {
    /// `p = value`, `x` uniform on `[x_lo, x_hi]`; layout `(x, p)`.
    DeltaMomentumLine { value: T, x_lo: T, x_hi: T },
    /// `n = 0`, `phi` uniform on `(-pi, pi)`; layout `(phi, n)`.
    UniformPhaseLine,
    /// `x = 0`, `p` uniform on `(0, 2 pi)`; layout `(x, p)`.
    UniformMomentumLine,
    /// Squeezed cavity vacuum with the spin in its lowest state; layout
    /// `(x, p_x, y, p_y)` with `y` and `p_y` of variances `1/(2 omega0)` and
    /// `omega0/2`.
    DickeSqueezedVacuum { x_var: T, px_var: T, omega0: T },
}

fn cell<T: Real>(i: usize, n: usize) -> T {
    (T::from_usize_lossy(i) + T::lit(0.5)) / T::from_usize_lossy(n)
}

pub fn build_initial_ensemble<T: Real>(
    spec: &InitialCondition<T>,
    n: usize,
    seed: u64,
) -> Result<Ensemble<T>> {
    if n == 0 {
        return Err(Error::invalid("ensemble size must be at least 1"));
    }
    let zero = T::zero();
    let two_pi = T::TAU();
    let points: Vec<PhasePoint<T>> = match *spec {
        InitialCondition::DeltaMomentumLine { value, x_lo, x_hi } => {
            if !(x_lo < x_hi) || !value.is_finite() || !x_hi.is_finite() || !x_lo.is_finite() {
                return Err(Error::invalid(
                    "momentum line needs a finite range x_lo < x_hi",
                ));
            }
            (0..n)
                .map(|i| {
                    PhasePoint::from_array([x_lo + (x_hi - x_lo) * cell::<T>(i, n), value], zero)
                })
                .collect()
        }
        InitialCondition::UniformPhaseLine => (0..n)
            .map(|i| PhasePoint::from_array([-T::PI() + two_pi * cell::<T>(i, n), zero], zero))
            .collect(),
        InitialCondition::UniformMomentumLine => (0..n)
            .map(|i| PhasePoint::from_array([zero, two_pi * cell::<T>(i, n)], zero))
            .collect(),
        InitialCondition::DickeSqueezedVacuum {
            x_var,
            px_var,
            omega0,
        } => {
            for (v, what) in [(x_var, "<x^2>"), (px_var, "<p_x^2>"), (omega0, "omega0")] {
                if !(v > zero && v.is_finite()) {
                    return Err(Error::invalid(format!("{what} must be positive, got {v}")));
                }
            }
            let product = x_var.to_f64_lossy() * px_var.to_f64_lossy();
            if product < 0.25 * (1.0 - 1e-9) {
                return Err(Error::invalid(format!(
                    "<x^2><p_x^2> = {product} violates the uncertainty bound 1/4"
                )));
            }
            let sx = x_var.sqrt();
            let sp = px_var.sqrt();
            let sy = (T::one() / (T::lit(2.0) * omega0)).sqrt();
            let spy = (omega0 * T::lit(0.5)).sqrt();
            (0..n)
                .map(|i| {
                    let mut rng =
                        TrajectoryRng::new(seed, i as u64, StreamDomain::InitialCondition);
                    let x = sx * rng.standard_normal::<T>();
                    let px = sp * rng.standard_normal::<T>();
                    let y = sy * rng.standard_normal::<T>();
                    let py = spy * rng.standard_normal::<T>();
                    PhasePoint::from_array([x, px, y, py], zero)
                })
                .collect()
        }
    };
    Ensemble::uniform(points, seed)
}
