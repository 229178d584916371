//! Generic ensemble-evolution engine.
//!
//! Trajectories are independent; each owns a counter-based random stream
//! keyed by `(master seed, stream id)` so that results do not depend on how
//! trajectories are scheduled across worker threads. Histograms are reduced
//! in a fixed chunk order for the same reason.

mod engine;
mod ensemble;
mod histogram;
mod point;
mod rng;
mod scheme;

pub use engine::{
    evolve_ensemble, iterate_map_ensemble, step, DivergencePolicy, EnsembleRun, Evolution,
    Observable, Snapshot, SnapshotPoint,
};
pub use ensemble::Ensemble;
pub use histogram::{fmt17, TimeAveragedHistogram};
pub use point::{PhasePoint, MAX_DIM};
pub use rng::{StreamDomain, TrajectoryRng};
pub use scheme::{StepKind, StepScheme};
