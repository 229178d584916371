use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};
use crate::models::lmg_energy;

/// Time-averaged marginal of the harmonic oscillator started on the line
/// `P(x, p) = P0 delta(p)`: `(2 P0 / pi) arsinh(x0 / |x|)`.
pub fn harmonic_marginal_exact(x: f64, x0: f64, p0: f64) -> Result<f64> {
    if x == 0.0 || !x.is_finite() {
        return Err(Error::DomainError(format!("marginal diverges at x = {x}")));
    }
    if !(x0 > 0.0 && p0 > 0.0) {
        return Err(Error::DomainError("x0 and P0 must be positive".into()));
    }
    Ok(2.0 * p0 / PI * (x0 / x.abs()).asinh())
}

/// `int_0^x arsinh(a/u) du` for `x >= 0`.
fn arsinh_antiderivative(x: f64, a: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * (a / x).asinh() + a * (x / a).asinh()
    }
}

/// Mean of [`harmonic_marginal_exact`] over `[lo, hi]`, which may contain 0.
pub fn harmonic_marginal_bin_average(lo: f64, hi: f64, x0: f64, p0: f64) -> Result<f64> {
    if !(hi > lo) {
        return Err(Error::DomainError(format!("empty interval [{lo}, {hi}]")));
    }
    if !(x0 > 0.0 && p0 > 0.0) {
        return Err(Error::DomainError("x0 and P0 must be positive".into()));
    }
    let prim = |x: f64| x.signum() * arsinh_antiderivative(x.abs(), x0);
    Ok(2.0 * p0 / PI * (prim(hi) - prim(lo)) / (hi - lo))
}

/// Growth of the log prefactor under linear damping, `(e^{eta tau} - 1)/(eta tau)`.
pub fn dissipative_prefactor(eta: f64, tau: f64) -> f64 {
    let z = eta * tau;
    if z.abs() < 1e-6 {
        1.0 + z / 2.0 + z * z / 6.0
    } else {
        z.exp_m1() / z
    }
}

/// Unnormalized Boltzmann weight `exp(-E(phi, n=0) / T)` of the spin model.
pub fn boltzmann_reference(phi: f64, temperature: f64, mu: f64, j: f64) -> Result<f64> {
    if !(temperature > 0.0) {
        return Err(Error::DomainError(format!(
            "temperature must be positive, got {temperature}"
        )));
    }
    Ok((-lmg_energy(phi, 0.0, mu, j) / temperature).exp())
}

/// Boltzmann density in `phi`, normalized on `(-pi, pi)`.
#[derive(Clone, Copy, Debug)]
pub struct BoltzmannReference {
    temperature: f64,
    mu: f64,
    j: f64,
    /// Energy shift that keeps the exponent non-positive.
    e_min: f64,
    norm: f64,
}

impl BoltzmannReference {
    pub fn new(temperature: f64, mu: f64, j: f64) -> Result<Self> {
        if !(temperature > 0.0) {
            return Err(Error::DomainError(format!(
                "temperature must be positive, got {temperature}"
            )));
        }
        let e_min = -j.abs();
        let mut r = Self {
            temperature,
            mu,
            j,
            e_min,
            norm: 1.0,
        };
        // Trapezoid quadrature converges geometrically for periodic integrands.
        let n = 4096;
        let z: f64 = (0..n)
            .map(|i| r.weight(-PI + TAU * i as f64 / n as f64))
            .sum::<f64>()
            * TAU
            / n as f64;
        r.norm = 1.0 / z;
        Ok(r)
    }

    fn weight(&self, phi: f64) -> f64 {
        (-(lmg_energy(phi, 0.0, self.mu, self.j) - self.e_min) / self.temperature).exp()
    }

    pub fn density(&self, phi: f64) -> f64 {
        self.norm * self.weight(phi)
    }

    /// Mean density over `[lo, hi]` (Simpson's rule).
    pub fn bin_average(&self, lo: f64, hi: f64) -> f64 {
        let m = 16;
        let h = (hi - lo) / m as f64;
        let mut s = self.density(lo) + self.density(hi);
        for i in 1..m {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * self.density(lo + h * i as f64);
        }
        s * h / 3.0 / (hi - lo)
    }
}
