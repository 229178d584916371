use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A trajectory produced a non-finite or runaway state.
    #[error("step diverged{} at t = {time}", trajectory_suffix(*.trajectory))]
    StepDiverged {
        trajectory: Option<usize>,
        time: f64,
    },

    /// The equations of motion are singular at the current coordinates
    /// (`|n| -> 1` for the spin models, `1 - eta_aux -> 0` for Dicke).
    #[error("singular coordinate{}: {what} at t = {time}", trajectory_suffix(*.trajectory))]
    SingularCoordinate {
        trajectory: Option<usize>,
        time: f64,
        what: String,
    },

    #[error("eigensolver did not converge for eigenvalue index {index}")]
    NoConvergence { index: usize },

    #[error("insufficient data: {used} points in window, need at least {needed}")]
    InsufficientData { used: usize, needed: usize },

    #[error("ill-conditioned fit: condition number {condition:e}")]
    IllConditioned { condition: f64 },

    #[error("outside domain: {0}")]
    DomainError(String),
}

fn trajectory_suffix(id: Option<usize>) -> String {
    match id {
        Some(i) => format!(" in trajectory {i}"),
        None => String::new(),
    }
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    /// Attaches a trajectory id to step-level errors raised without one.
    pub fn with_trajectory(self, id: usize) -> Self {
        match self {
            Error::StepDiverged { time, .. } => Error::StepDiverged {
                trajectory: Some(id),
                time,
            },
            Error::SingularCoordinate { time, what, .. } => Error::SingularCoordinate {
                trajectory: Some(id),
                time,
                what,
            },
            other => other,
        }
    }

    /// Trajectory id for trajectory-level failures.
    pub fn trajectory(&self) -> Option<usize> {
        match self {
            Error::StepDiverged { trajectory, .. }
            | Error::SingularCoordinate { trajectory, .. } => *trajectory,
            _ => None,
        }
    }

    /// Short machine-readable tag, used by the experiment runner's error JSON.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "InvalidInput",
            Error::StepDiverged { .. } => "StepDiverged",
            Error::SingularCoordinate { .. } => "SingularCoordinate",
            Error::NoConvergence { .. } => "NoConvergence",
            Error::InsufficientData { .. } => "InsufficientData",
            Error::IllConditioned { .. } => "IllConditioned",
            Error::DomainError(_) => "DomainError",
        }
    }
}
