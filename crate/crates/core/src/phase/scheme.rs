use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StepKind {
    Rk4,
    /// Generalized (implicit) Stormer-Verlet; explicit for separable
    /// Hamiltonians. Requires a conservative model.
    SymplecticLeapfrog,
    Euler,
    EulerMaruyama,
    /// One application of a discrete map; `dt` is ignored.
    DiscreteMap,
}

impl StepKind {
    pub fn name(self) -> &'static str {
        match self {
            StepKind::Rk4 => "rk4",
            StepKind::SymplecticLeapfrog => "symplectic_leapfrog",
            StepKind::Euler => "euler",
            StepKind::EulerMaruyama => "euler_maruyama",
            StepKind::DiscreteMap => "discrete_map",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "rk4" => StepKind::Rk4,
            "symplectic_leapfrog" | "leapfrog" => StepKind::SymplecticLeapfrog,
            "euler" => StepKind::Euler,
            "euler_maruyama" => StepKind::EulerMaruyama,
            "discrete_map" => StepKind::DiscreteMap,
            _ => return None,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepScheme<T> {
    pub kind: StepKind,
    pub dt: T,
}

impl<T: Real> StepScheme<T> {
    pub fn new(kind: StepKind, dt: T) -> Result<Self> {
        let s = Self { kind, dt };
        s.validate()?;
        Ok(s)
    }

    pub fn discrete_map() -> Self {
        Self {
            kind: StepKind::DiscreteMap,
            dt: T::one(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.kind != StepKind::DiscreteMap && !(self.dt > T::zero() && self.dt.is_finite()) {
            return Err(Error::invalid("dt must be positive"));
        }
        Ok(())
    }

    /// Time advanced by one step: `dt`, or one iteration for maps.
    pub fn increment(&self) -> T {
        match self.kind {
            StepKind::DiscreteMap => T::one(),
            _ => self.dt,
        }
    }

    pub fn is_stochastic(&self) -> bool {
        self.kind == StepKind::EulerMaruyama
    }
}
