use std::fmt::Write as _;

use crate::error::{Error, Result};

/// Streaming accumulator for the time-averaged density of one observable.
///
/// Every recorded sample adds its weight to `total_weight`; samples inside
/// `[lo, hi)` also add it to their bin. The density of a bin is
/// `counts / (total_weight * bin_width)`, so the density integrates to the
/// in-range fraction of the samples.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeAveragedHistogram {
    lo: f64,
    hi: f64,
    counts: Vec<f64>,
    total_weight: f64,
    t_window: (f64, f64),
}

impl TimeAveragedHistogram {
    pub fn new(lo: f64, hi: f64, n_bins: usize) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::invalid(format!(
                "histogram range [{lo}, {hi}) is empty"
            )));
        }
        if n_bins == 0 {
            return Err(Error::invalid("histogram needs at least one bin"));
        }
        Ok(Self {
            lo,
            hi,
            counts: vec![0.0; n_bins],
            total_weight: 0.0,
            t_window: (f64::INFINITY, f64::NEG_INFINITY),
        })
    }

    /// Histogram with the same binning and nothing recorded.
    pub fn empty_like(&self) -> Self {
        Self {
            lo: self.lo,
            hi: self.hi,
            counts: vec![0.0; self.counts.len()],
            total_weight: 0.0,
            t_window: (f64::INFINITY, f64::NEG_INFINITY),
        }
    }

    #[inline]
    pub fn record(&mut self, value: f64, weight: f64) {
        self.total_weight += weight;
        if let Some(b) = self.bin_of(value) {
            self.counts[b] += weight;
        }
    }

    /// Records a sample taken at time `t`, widening the time window.
    #[inline]
    pub fn record_at(&mut self, value: f64, weight: f64, t: f64) {
        self.record(value, weight);
        self.note_time(t);
    }

    #[inline]
    pub(crate) fn note_time(&mut self, t: f64) {
        if t < self.t_window.0 {
            self.t_window.0 = t;
        }
        if t > self.t_window.1 {
            self.t_window.1 = t;
        }
    }

    #[inline]
    pub fn bin_of(&self, value: f64) -> Option<usize> {
        if !(value >= self.lo && value < self.hi) {
            return None;
        }
        let b = ((value - self.lo) / self.bin_width()) as usize;
        Some(b.min(self.counts.len() - 1))
    }

    pub fn merge(&mut self, other: &Self) -> Result<()> {
        if self.lo != other.lo || self.hi != other.hi || self.counts.len() != other.counts.len() {
            return Err(Error::invalid(
                "cannot merge histograms with different binning",
            ));
        }
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += *b;
        }
        self.total_weight += other.total_weight;
        self.t_window.0 = self.t_window.0.min(other.t_window.0);
        self.t_window.1 = self.t_window.1.max(other.t_window.1);
        Ok(())
    }

    pub(crate) fn clear(&mut self) {
        self.counts.iter_mut().for_each(|c| *c = 0.0);
        self.total_weight = 0.0;
        self.t_window = (f64::INFINITY, f64::NEG_INFINITY);
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn n_bins(&self) -> usize {
        self.counts.len()
    }

    pub fn bin_width(&self) -> f64 {
        (self.hi - self.lo) / self.counts.len() as f64
    }

    pub fn counts(&self) -> &[f64] {
        &self.counts
    }

    pub fn total_weight(&self) -> f64 {
        self.total_weight
    }

    /// First and last sample times, `(inf, -inf)` while empty.
    pub fn t_window(&self) -> (f64, f64) {
        self.t_window
    }

    pub fn bin_center(&self, b: usize) -> f64 {
        self.lo + (b as f64 + 0.5) * self.bin_width()
    }

    pub fn bin_edges(&self, b: usize) -> (f64, f64) {
        let w = self.bin_width();
        (self.lo + b as f64 * w, self.lo + (b + 1) as f64 * w)
    }

    pub fn bin_centers(&self) -> Vec<f64> {
        (0..self.counts.len()).map(|b| self.bin_center(b)).collect()
    }

    pub fn density(&self, b: usize) -> f64 {
        if self.total_weight == 0.0 {
            return 0.0;
        }
        self.counts[b] / (self.total_weight * self.bin_width())
    }

    pub fn densities(&self) -> Vec<f64> {
        (0..self.counts.len()).map(|b| self.density(b)).collect()
    }

    /// Fraction of the recorded weight that fell inside `[lo, hi)`.
    pub fn in_range_fraction(&self) -> f64 {
        if self.total_weight == 0.0 {
            return 0.0;
        }
        self.counts.iter().sum::<f64>() / self.total_weight
    }

    /// `bin_center,density` CSV with 17 significant digits and LF endings.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("bin_center,density\n");
        for b in 0..self.counts.len() {
            let _ = writeln!(
                out,
                "{},{}",
                fmt17(self.bin_center(b)),
                fmt17(self.density(b))
            );
        }
        out
    }
}

/// Decimal rendering with 17 significant digits, enough to round-trip `f64`.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn density_normalization() {
        let mut h = TimeAveragedHistogram::new(-1.0, 1.0, 4).unwrap();
        for v in [-0.9, -0.1, 0.1, 0.2, 5.0] {
            h.record(v, 1.0);
        }
        assert_eq!(h.counts(), &[1.0, 1.0, 2.0, 0.0]);
        let integral: f64 = h.densities().iter().map(|d| d * h.bin_width()).sum();
        assert!((integral - 0.8).abs() < 1e-12);
        assert!((h.in_range_fraction() - 0.8).abs() < 1e-12);
    }

    #[test]
    fn upper_edge_and_nan_are_out_of_range() {
        let mut h = TimeAveragedHistogram::new(0.0, 1.0, 10).unwrap();
        h.record(1.0, 1.0);
        h.record(f64::NAN, 1.0);
        h.record(0.0, 1.0);
        assert_eq!(h.counts().iter().sum::<f64>(), 1.0);
        assert_eq!(h.total_weight(), 3.0);
        assert_eq!(h.bin_of(0.999_999_999_999_999_9), Some(9));
    }

    #[test]
    fn merge_requires_same_binning() {
        let mut a = TimeAveragedHistogram::new(0.0, 1.0, 10).unwrap();
        let b = TimeAveragedHistogram::new(0.0, 1.0, 11).unwrap();
        assert!(a.merge(&b).is_err());
        assert!(TimeAveragedHistogram::new(1.0, 1.0, 3).is_err());
        assert!(TimeAveragedHistogram::new(0.0, 1.0, 0).is_err());
    }

    #[test]
    fn csv_header_and_precision() {
        let mut h = TimeAveragedHistogram::new(0.0, 1.0, 2).unwrap();
        h.record(0.1, 1.0);
        let csv = h.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("bin_center,density"));
        let first: Vec<f64> = lines
            .next()
            .unwrap()
            .split(',')
            .map(|s| s.parse().unwrap())
            .collect();
        assert_eq!(first, vec![0.25, 2.0]);
        assert!(!csv.contains('\r'));
        assert_eq!(fmt17(0.1).parse::<f64>().unwrap(), 0.1);
    }

    #[test]
    fn time_window_tracks_samples() {
        let mut h = TimeAveragedHistogram::new(0.0, 1.0, 2).unwrap();
        h.record_at(0.5, 1.0, 2.0);
        h.record_at(0.5, 1.0, 0.5);
        assert_eq!(h.t_window(), (0.5, 2.0));
    }
}
