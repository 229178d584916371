use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phase::TimeAveragedHistogram;

/// Fewest points a fit accepts.
pub const MIN_FIT_POINTS: usize = 8;
/// `|kappa|` below this counts as "no logarithmic divergence".
pub const NO_DIVERGENCE_THRESHOLD: f64 = 0.02;
const MAX_CONDITION: f64 = 1e12;

/// Result of fitting `P(v) = kappa * log|v| + offset`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogFit {
    pub kappa: f64,
    pub offset: f64,
    pub window: (f64, f64),
    /// Root-mean-square deviation of the data from the fitted line.
    pub residual: f64,
    pub n_bins_used: usize,
}

impl LogFit {
    pub fn is_divergent(&self) -> bool {
        self.kappa.abs() >= NO_DIVERGENCE_THRESHOLD
    }

    pub fn predict(&self, v: f64) -> f64 {
        self.kappa * v.abs().ln() + self.offset
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FitPoint {
    pub v: f64,
    pub density: f64,
    pub weight: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub residual: f64,
    pub n: usize,
}

/// Weighted least squares `y = slope * x + intercept`.
pub fn linear_fit(x: &[f64], y: &[f64], w: &[f64]) -> Result<LinearFit> {
    if x.len() != y.len() || x.len() != w.len() {
        return Err(Error::invalid("fit inputs must have equal length"));
    }
    let n = x
        .iter()
        .zip(w)
        .filter(|(xi, wi)| **wi > 0.0 && xi.is_finite())
        .count();
    if n < MIN_FIT_POINTS {
        return Err(Error::InsufficientData {
            used: n,
            needed: MIN_FIT_POINTS,
        });
    }
    let sw: f64 = w.iter().sum();
    let xm = x.iter().zip(w).map(|(a, b)| a * b).sum::<f64>() / sw;
    let ym = y.iter().zip(w).map(|(a, b)| a * b).sum::<f64>() / sw;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for ((xi, yi), wi) in x.iter().zip(y).zip(w) {
        let dx = xi - xm;
        sxx += wi * dx * dx;
        sxy += wi * dx * (yi - ym);
    }
    // Condition number of the weighted design matrix [x, 1].
    let a = w.iter().zip(x).map(|(wi, xi)| wi * xi * xi).sum::<f64>();
    let b = w.iter().zip(x).map(|(wi, xi)| wi * xi).sum::<f64>();
    let c = sw;
    let tr = a + c;
    let disc = ((a - c) * (a - c) + 4.0 * b * b).sqrt();
    let (hi, lo) = ((tr + disc) / 2.0, (tr - disc) / 2.0);
    let condition = if lo > 0.0 {
        (hi / lo).sqrt()
    } else {
        f64::INFINITY
    };
    if !(condition <= MAX_CONDITION) || sxx <= 0.0 {
        return Err(Error::IllConditioned { condition });
    }
    let slope = sxy / sxx;
    let intercept = ym - slope * xm;
    let mut ss = 0.0;
    let mut used = 0;
    for ((xi, yi), wi) in x.iter().zip(y).zip(w) {
        if *wi > 0.0 {
            let r = yi - (slope * xi + intercept);
            ss += r * r;
            used += 1;
        }
    }
    Ok(LinearFit {
        slope,
        intercept,
        residual: (ss / used as f64).sqrt(),
        n: used,
    })
}

/// Fits `density = kappa * log(v) + offset` to points with `v > 0`.
pub fn fit_log_points(points: &[FitPoint], window: (f64, f64)) -> Result<LogFit> {
    let inside: Vec<&FitPoint> = points
        .iter()
        .filter(|p| p.v >= window.0 && p.v <= window.1 && p.weight > 0.0)
        .collect();
    let x: Vec<f64> = inside.iter().map(|p| p.v.ln()).collect();
    let y: Vec<f64> = inside.iter().map(|p| p.density).collect();
    let w: Vec<f64> = inside.iter().map(|p| p.weight).collect();
    let f = linear_fit(&x, &y, &w)?;
    Ok(LogFit {
        kappa: f.slope,
        offset: f.intercept,
        window,
        residual: f.residual,
        n_bins_used: f.n,
    })
}

/// Bins of `hist` whose centers lie in the window, as fit points weighted by
/// their counts. With `symmetrize`, bins at negative centers are folded onto
/// `|v|` and pooled with the positive side.
pub fn log_fit_points(
    hist: &TimeAveragedHistogram,
    window: (f64, f64),
    symmetrize: bool,
) -> Vec<FitPoint> {
    let mut out = Vec::new();
    for b in 0..hist.n_bins() {
        let c = hist.bin_center(b);
        let v = if symmetrize { c.abs() } else { c };
        if v >= window.0 && v <= window.1 && hist.counts()[b] > 0.0 {
            out.push(FitPoint {
                v,
                density: hist.density(b),
                weight: hist.counts()[b],
            });
        }
    }
    out
}

/// Weighted fit of `density = kappa log|v| + offset` over `window`.
pub fn fit_log_divergence(
    hist: &TimeAveragedHistogram,
    window: (f64, f64),
    symmetrize: bool,
) -> Result<LogFit> {
    let (lo, hi) = window;
    if !(lo > 0.0 && hi > lo && lo.is_finite() && hi.is_finite()) {
        return Err(Error::invalid(format!(
            "fit window ({lo}, {hi}) must satisfy 0 < lo < hi"
        )));
    }
    let reach = if symmetrize {
        hist.hi().max(-hist.lo())
    } else {
        hist.hi()
    };
    if hi > reach || (!symmetrize && lo < hist.lo()) {
        return Err(Error::invalid(format!(
            "fit window ({lo}, {hi}) leaves the histogram range"
        )));
    }
    fit_log_points(&log_fit_points(hist, window, symmetrize), window)
}
