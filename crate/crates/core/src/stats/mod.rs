//! Log-divergence fits, closed-form reference densities and parameter sweeps.

mod fit;
mod oracle;
mod sweep;

pub use fit::{
    fit_log_divergence, fit_log_points, linear_fit, log_fit_points, FitPoint, LinearFit, LogFit,
    MIN_FIT_POINTS, NO_DIVERGENCE_THRESHOLD,
};
pub use oracle::{
    boltzmann_reference, dissipative_prefactor, harmonic_marginal_bin_average,
    harmonic_marginal_exact, BoltzmannReference,
};
pub use sweep::{kappa_sweep, KappaSweep, SweepFailure};

/// Default fit window for phase-like observables (radians).
pub const PHASE_WINDOW: (f64, f64) = (1e-2, 0.3);
/// Default fit window for the kicked-rotor momentum.
pub const KICKED_ROTOR_WINDOW: (f64, f64) = (2e-2, 0.3);
/// Upper edge of the quantum `m_y` fit window.
pub const QUANTUM_WINDOW_TOP: f64 = 0.05;

/// Quantum `m_y` window: from five grid spacings up to [`QUANTUM_WINDOW_TOP`].
pub fn quantum_window(s: f64) -> (f64, f64) {
    (5.0 / s, QUANTUM_WINDOW_TOP)
}
