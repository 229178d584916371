use crate::error::{Error, Result};
use crate::scalar::Real;

use super::PhasePoint;

/// Weighted collection of trajectories sharing a master seed.
#[derive(Clone, Debug)]
pub struct Ensemble<T> {
    points: Vec<PhasePoint<T>>,
    weights: Vec<T>,
    seed: u64,
    stream_ids: Vec<u64>,
}

impl<T: Real> Ensemble<T> {
    /// Equally weighted ensemble; trajectory `i` gets stream id `i`.
    pub fn uniform(points: Vec<PhasePoint<T>>, seed: u64) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::invalid("empty ensemble"));
        }
        let w = T::one() / T::from_usize_lossy(points.len());
        let weights = vec![w; points.len()];
        let stream_ids = (0..points.len() as u64).collect();
        Self::with_weights(points, weights, seed, stream_ids)
    }

    pub fn with_weights(
        points: Vec<PhasePoint<T>>,
        weights: Vec<T>,
        seed: u64,
        stream_ids: Vec<u64>,
    ) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::invalid("empty ensemble"));
        }
        if weights.len() != points.len() || stream_ids.len() != points.len() {
            return Err(Error::invalid(
                "points, weights and stream ids must have equal length",
            ));
        }
        let dim = points[0].dim();
        if points.iter().any(|p| p.dim() != dim) {
            return Err(Error::invalid("all points must share one dimension"));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w >= T::zero())) {
            return Err(Error::invalid("weights must be finite and non-negative"));
        }
        let total: f64 = weights.iter().map(|w| w.to_f64_lossy()).sum();
        // f32 weights cannot meet 1e-12; scale the tolerance with epsilon.
        let tol = 1e-12_f64.max(4.0 * T::epsilon().to_f64_lossy() * points.len() as f64);
        if (total - 1.0).abs() > tol {
            return Err(Error::invalid(format!(
                "weights sum to {total}, expected 1"
            )));
        }
        Ok(Self {
            points,
            weights,
            seed,
            stream_ids,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points[0].dim()
    }

    pub fn points(&self) -> &[PhasePoint<T>] {
        &self.points
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_ids(&self) -> &[u64] {
        &self.stream_ids
    }

    /// Per-sample histogram increments. Equal weights map to exactly `1.0`
    /// so that accumulated counts are integers and merging is exact.
    pub fn sample_increments(&self) -> Vec<f64> {
        let first = self.weights[0];
        if self.weights.iter().all(|w| *w == first) {
            vec![1.0; self.len()]
        } else {
            let n = self.len() as f64;
            self.weights.iter().map(|w| w.to_f64_lossy() * n).collect()
        }
    }
}
