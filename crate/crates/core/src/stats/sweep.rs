use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::LogFit;

/// Fitted `kappa` along a control-parameter grid. Failed grid points keep
/// `NaN` (serialized as `null`) and are listed in `failures`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KappaSweep {
    pub parameter: String,
    pub grid: Vec<f64>,
    pub kappa: Vec<f64>,
    pub residual: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub failures: Vec<SweepFailure>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepFailure {
    pub index: usize,
    pub error: String,
}

impl KappaSweep {
    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }
}

/// Runs `experiment` at every grid value (in parallel) and collects the fits.
pub fn kappa_sweep<F>(parameter: &str, grid: &[f64], experiment: F) -> Result<KappaSweep>
where
    F: Fn(f64) -> Result<LogFit> + Sync,
{
    if grid.is_empty() {
        return Err(Error::invalid("sweep grid is empty"));
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) || grid.iter().any(|g| !g.is_finite()) {
        return Err(Error::invalid(
            "sweep grid must be finite and strictly ascending",
        ));
    }
    let fits: Vec<Result<LogFit>> = grid.par_iter().map(|&g| experiment(g)).collect();
    let mut sweep = KappaSweep {
        parameter: parameter.to_string(),
        grid: grid.to_vec(),
        kappa: Vec::with_capacity(grid.len()),
        residual: Vec::with_capacity(grid.len()),
        failures: Vec::new(),
    };
    for (index, fit) in fits.into_iter().enumerate() {
        match fit {
            Ok(f) => {
                sweep.kappa.push(f.kappa);
                sweep.residual.push(f.residual);
            }
            Err(e) => {
                sweep.kappa.push(f64::NAN);
                sweep.residual.push(f64::NAN);
                sweep.failures.push(SweepFailure {
                    index,
                    error: e.to_string(),
                });
            }
        }
    }
    Ok(sweep)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fit(k: f64) -> LogFit {
        LogFit {
            kappa: k,
            offset: 0.0,
            window: (0.1, 1.0),
            residual: 0.0,
            n_bins_used: 8,
        }
    }

    #[test]
    fn records_failures_and_continues() {
        let s = kappa_sweep("K", &[1.0, 2.0, 3.0], |g| {
            if g == 2.0 {
                Err(Error::InsufficientData { used: 1, needed: 8 })
            } else {
                Ok(fit(-g))
            }
        })
        .unwrap();
        assert_eq!(s.kappa[0], -1.0);
        assert!(s.kappa[1].is_nan());
        assert_eq!(s.kappa[2], -3.0);
        assert_eq!(s.failures.len(), 1);
        let json = serde_json::to_value(&s).unwrap();
        assert!(json["kappa"][1].is_null());
    }

    #[test]
    fn grid_must_ascend() {
        assert!(kappa_sweep("K", &[], |g| Ok(fit(g))).is_err());
        assert!(kappa_sweep("K", &[1.0, 1.0], |g| Ok(fit(g))).is_err());
        let s = kappa_sweep("K", &[1.0, 2.0], |g| Ok(fit(g))).unwrap();
        assert!(s.failures.is_empty());
        assert!(serde_json::to_value(&s).unwrap().get("failures").is_none());
    }
}
