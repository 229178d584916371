use crate::error::{Error, Result};
use crate::phase::PhasePoint;
use crate::scalar::Real;

/// Distance from the poles `|n| = 1` below which the `(phi, n)` chart is
/// considered singular.
pub const N_EDGE: f64 = 1e-12;

/// Semiclassical spin model `E = (mu/2) n^2 + J sqrt(1-n^2) cos(phi)`
/// with the optional field `alpha`, the `S_x^2` coupling `beta`, linear
/// damping `eta` of `n` and a bath at temperature `temperature`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LmgParams<T> {
    pub mu: T,
    pub j: T,
    pub alpha: T,
    pub beta: T,
    pub eta: T,
    pub temperature: T,
}

impl<T: Real> LmgParams<T> {
    pub fn new(mu: T, j: T) -> Self {
        Self {
            mu,
            j,
            alpha: T::zero(),
            beta: T::zero(),
            eta: T::zero(),
            temperature: T::zero(),
        }
    }

    pub fn with_alpha(mut self, alpha: T) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn with_beta(mut self, beta: T) -> Self {
        self.beta = beta;
        self
    }

    pub fn with_damping(mut self, eta: T) -> Self {
        self.eta = eta;
        self
    }

    pub fn with_temperature(mut self, temperature: T) -> Self {
        self.temperature = temperature;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let all = [
            self.mu,
            self.j,
            self.alpha,
            self.beta,
            self.eta,
            self.temperature,
        ];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("spin-model parameters must be finite"));
        }
        if self.eta < T::zero() {
            return Err(Error::invalid(format!(
                "eta must be non-negative, got {}",
                self.eta
            )));
        }
        if self.temperature < T::zero() {
            return Err(Error::invalid(format!(
                "temperature must be non-negative, got {}",
                self.temperature
            )));
        }
        Ok(())
    }

    /// Phase of the energy minimum on `n = 0`: `pi` for `J > 0`, `0` for
    /// `J < 0`. Phase observables are measured from this point.
    pub fn stable_phase(&self) -> T {
        if self.j >= T::zero() {
            T::PI()
        } else {
            T::zero()
        }
    }
}

/// Deterministic vector field `(dphi/dt, dn/dt)`.
///
/// The conservative part is the Hamiltonian flow of [`lmg_energy_extended`]
/// (`dphi/dt = dE/dn`, `dn/dt = -dE/dphi`); damping adds `-2 eta n`.
pub fn lmg_rhs<T: Real>(point: &PhasePoint<T>, p: &LmgParams<T>) -> Result<[T; 2]> {
    let (phi, n) = (point[0], point[1]);
    if !(n.abs() < T::one() - T::lit(N_EDGE)) {
        if !n.is_finite() {
            return Err(Error::StepDiverged {
                trajectory: None,
                time: point.t.to_f64_lossy(),
            });
        }
        return Err(Error::SingularCoordinate {
            trajectory: None,
            time: point.t.to_f64_lossy(),
            what: format!("|n| = {} at the pole", n.abs()),
        });
    }
    let one_m = T::one() - n * n;
    let s = one_m.sqrt();
    let (sin, cos) = phi.sin_cos();
    let two = T::lit(2.0);
    let mut dphi = p.mu * n - p.j * n * cos / s + p.alpha;
    let mut dn = p.j * s * sin - two * p.eta * n;
    if p.beta != T::zero() {
        dphi = dphi - p.beta * n * cos * cos;
        dn = dn + p.beta * one_m * sin * cos;
    }
    Ok([dphi, dn])
}

/// White-noise strength `sqrt(4 eta T)` acting on `dn/dt`.
pub fn lmg_noise_amplitude<T: Real>(eta: T, temperature: T) -> T {
    (T::lit(4.0) * eta * temperature).max(T::zero()).sqrt()
}

/// `E(phi, n) = (mu/2) n^2 + J sqrt(1-n^2) cos(phi)`.
pub fn lmg_energy<T: Real>(phi: T, n: T, mu: T, j: T) -> T {
    let s = (T::one() - n * n).max(T::zero()).sqrt();
    T::lit(0.5) * mu * n * n + j * s * phi.cos()
}

/// [`lmg_energy`] plus `alpha n + (beta/2)(1-n^2) cos^2(phi)`.
pub fn lmg_energy_extended<T: Real>(phi: T, n: T, p: &LmgParams<T>) -> T {
    let c = phi.cos();
    lmg_energy(phi, n, p.mu, p.j) + p.alpha * n + T::lit(0.5) * p.beta * (T::one() - n * n) * c * c
}

/// Continues a small overshoot of `|n|` over the pole: `n` is reflected back
/// inside the chart and the phase turns by `pi`. Returns `None` when the
/// overshoot exceeds `tolerance`.
pub(crate) fn cross_pole<T: Real>(phi: T, n: T, tolerance: T) -> Option<(T, T)> {
    let edge = T::one() - T::lit(N_EDGE);
    if n.abs() < edge || !n.is_finite() {
        return Some((phi, n));
    }
    let over = n.abs() - edge;
    if over >= tolerance {
        return None;
    }
    let inside = edge - over;
    // Reflection must land strictly inside.
    let inside = if inside.abs() >= edge {
        edge - edge * T::epsilon()
    } else {
        inside
    };
    Some(((phi + T::PI()).wrap_pi(), inside.copysign(n)))
}

/// Parameters of the spin model equivalent to a two-site Bose-Hubbard
/// system of `N` particles: the couplings carry over and `S = N/2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoseHubbardMapping {
    pub mu: f64,
    pub j: f64,
    pub s: f64,
}

pub fn bose_hubbard_to_lmg(mu_bh: f64, j_bh: f64, n_particles: u64) -> Result<BoseHubbardMapping> {
    if n_particles == 0 {
        return Err(Error::invalid("need at least one particle"));
    }
    Ok(BoseHubbardMapping {
        mu: mu_bh,
        j: j_bh,
        s: n_particles as f64 / 2.0,
    })
}
