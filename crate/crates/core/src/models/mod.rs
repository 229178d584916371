//! Equations of motion and initial ensembles.
//!
//! Coordinate layouts: harmonic `(x, p)`, spin model `(phi, n)`, kicked
//! rotor `(x, p)` and Dicke `(x, p_x, y, p_y)`.

mod dicke;
mod harmonic;
mod initial;
mod kicked;
mod lmg;

pub use dicke::{dicke_energy, dicke_eta_aux, dicke_rhs, DickeParams};
pub use harmonic::{harmonic_energy, harmonic_rhs};
pub use initial::{build_initial_ensemble, InitialCondition};
pub use kicked::{chirikov_inverse, chirikov_step};
pub use lmg::{
    bose_hubbard_to_lmg, lmg_energy, lmg_energy_extended, lmg_noise_amplitude, lmg_rhs,
    BoseHubbardMapping, LmgParams, N_EDGE,
};

use crate::error::{Error, Result};
use crate::phase::{PhasePoint, MAX_DIM};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ModelSpec<T> {
    Harmonic { m: T, omega0: T },
    Lmg(LmgParams<T>),
    Dicke(DickeParams<T>),
    KickedRotor { k: T },
}

impl<T: Real> ModelSpec<T> {
    pub fn name(&self) -> &'static str {
        match self {
            ModelSpec::Harmonic { .. } => "harmonic",
            ModelSpec::Lmg(_) => "lmg",
            ModelSpec::Dicke(_) => "dicke",
            ModelSpec::KickedRotor { .. } => "kicked_rotor",
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            ModelSpec::Dicke(_) => 4,
            _ => 2,
        }
    }

    pub fn is_map(&self) -> bool {
        matches!(self, ModelSpec::KickedRotor { .. })
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |v: T, what: &str| {
            if v > T::zero() && v.is_finite() {
                Ok(())
            } else {
                Err(Error::invalid(format!("{what} must be positive, got {v}")))
            }
        };
        match *self {
            ModelSpec::Harmonic { m, omega0 } => {
                positive(m, "m")?;
                positive(omega0, "omega0")
            }
            ModelSpec::Lmg(p) => p.validate(),
            ModelSpec::Dicke(p) => p.validate(),
            ModelSpec::KickedRotor { k } => {
                if k >= T::zero() && k.is_finite() {
                    Ok(())
                } else {
                    Err(Error::invalid(format!("K must be non-negative, got {k}")))
                }
            }
        }
    }

    /// Deterministic vector field.
    pub fn rhs(&self, p: &PhasePoint<T>) -> Result<[T; MAX_DIM]> {
        let mut out = [T::zero(); MAX_DIM];
        match self {
            ModelSpec::Harmonic { m, omega0 } => {
                let [a, b] = harmonic_rhs(p, *m, *omega0);
                out[0] = a;
                out[1] = b;
            }
            ModelSpec::Lmg(params) => {
                let [a, b] = lmg_rhs(p, params).map_err(|e| at_time(e, p.t))?;
                out[0] = a;
                out[1] = b;
            }
            ModelSpec::Dicke(params) => {
                out = pad(dicke_rhs(p, params).map_err(|e| at_time(e, p.t))?)
            }
            ModelSpec::KickedRotor { .. } => {
                return Err(Error::invalid(
                    "the kicked rotor is a discrete map without a vector field",
                ))
            }
        }
        Ok(out)
    }

    /// Coordinate index and strength of additive white noise, if any.
    pub fn noise_channel(&self) -> Option<(usize, T)> {
        match self {
            ModelSpec::Lmg(p) => {
                let amp = lmg_noise_amplitude(p.eta, p.temperature);
                (amp > T::zero()).then_some((1, amp))
            }
            _ => None,
        }
    }

    /// `(q, p)` index pairs for Hamiltonian models; `None` when the flow is
    /// dissipative or discrete.
    pub fn canonical_pairs(&self) -> Option<&'static [(usize, usize)]> {
        match self {
            ModelSpec::Harmonic { .. } => Some(&[(0, 1)]),
            ModelSpec::Lmg(p) if p.eta == T::zero() => Some(&[(0, 1)]),
            ModelSpec::Dicke(_) => Some(&[(0, 1), (2, 3)]),
            _ => None,
        }
    }

    /// Conserved energy for Hamiltonian models.
    pub fn energy(&self, p: &PhasePoint<T>) -> Option<T> {
        match self {
            ModelSpec::Harmonic { m, omega0 } => Some(harmonic_energy(p, *m, *omega0)),
            ModelSpec::Lmg(params) if params.eta == T::zero() => {
                Some(lmg_energy_extended(p[0], p[1], params))
            }
            ModelSpec::Dicke(params) => Some(dicke_energy(p, params)),
            _ => None,
        }
    }

    pub(crate) fn map_step(&self, p: &PhasePoint<T>) -> PhasePoint<T> {
        match self {
            ModelSpec::KickedRotor { k } => {
                let (x, q) = chirikov_step(p[0], p[1], *k);
                PhasePoint::from_array([x, q], p.t)
            }
            _ => *p,
        }
    }

    /// Post-step projection onto the model's domain.
    ///
    /// For the spin model the phase is wrapped into `[-pi, pi)` and a small
    /// overshoot of `|n| = 1` continues over the pole. The allowed overshoot
    /// is `10 (dt + sigma sqrt(dt))` with `sigma` the noise strength.
    pub(crate) fn constrain(&self, p: &mut PhasePoint<T>, dt: T) -> Result<()> {
        if let ModelSpec::Lmg(params) = self {
            let time = p.t.to_f64_lossy();
            let sigma = lmg_noise_amplitude(params.eta, params.temperature);
            let tolerance = T::lit(10.0) * (dt + sigma * dt.sqrt());
            let c = p.coords_mut();
            let (phi, n) = lmg::cross_pole(c[0].wrap_pi(), c[1], tolerance).ok_or_else(|| {
                Error::SingularCoordinate {
                    trajectory: None,
                    time,
                    what: "|n| overshot the pole".into(),
                }
            })?;
            c[0] = phi;
            c[1] = n;
        }
        Ok(())
    }
}

fn at_time(e: Error, t: impl Real) -> Error {
    match e {
        Error::SingularCoordinate {
            trajectory, what, ..
        } => Error::SingularCoordinate {
            trajectory,
            time: t.to_f64_lossy(),
            what,
        },
        other => other,
    }
}

fn pad<T: Real>(v: [T; 4]) -> [T; MAX_DIM] {
    let mut out = [T::zero(); MAX_DIM];
    out[..4].copy_from_slice(&v);
    out
}
