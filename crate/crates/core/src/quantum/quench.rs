use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phase::fmt17;
use crate::stats::{fit_log_points, linear_fit, FitPoint, LogFit, MIN_FIT_POINTS};

use super::eigen::{eigendecompose, SpectralDecomposition};
use super::spin::{build_hamiltonian, spin_operator, Axis};

/// Window in `1 - m_x` for the tail exponent, in units of the grid spacing
/// at the bottom.
const TAIL_WINDOW: (f64, f64) = (10.0, 0.1);
/// Relative splitting below which eigenvalues form a degenerate block.
const DEGENERACY: f64 = 1e-10;
/// Overlaps `|c_k|^2` below this are dropped.
const NEGLIGIBLE_WEIGHT: f64 = 1e-28;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum QuantumObservable {
    #[serde(rename = "m_y")]
    My,
    #[serde(rename = "m_x")]
    Mx,
}

impl QuantumObservable {
    pub fn name(self) -> &'static str {
        match self {
            QuantumObservable::My => "m_y",
            QuantumObservable::Mx => "m_x",
        }
    }

    fn axis(self) -> Axis {
        match self {
            QuantumObservable::My => Axis::Y,
            QuantumObservable::Mx => Axis::X,
        }
    }
}

/// Infinite-time averaged distribution of `m = S_axis / S` after the quench.
#[derive(Clone, Debug, PartialEq)]
pub struct QuenchDistribution {
    pub observable: QuantumObservable,
    pub s: u32,
    /// `m = -1, -1 + 1/S, ..., 1`.
    pub values: Vec<f64>,
    pub probabilities: Vec<f64>,
}

impl QuenchDistribution {
    /// Probability per unit `m`.
    pub fn density(&self, i: usize) -> f64 {
        self.probabilities[i] * self.s as f64
    }

    pub fn total(&self) -> f64 {
        self.probabilities.iter().sum()
    }

    /// Largest `|P(m) - P(-m)|`.
    pub fn parity_defect(&self) -> f64 {
        let n = self.probabilities.len();
        (0..n)
            .map(|i| (self.probabilities[i] - self.probabilities[n - 1 - i]).abs())
            .fold(0.0, f64::max)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("m,probability\n");
        for (m, p) in self.values.iter().zip(&self.probabilities) {
            let _ = writeln!(out, "{},{}", fmt17(*m), fmt17(*p));
        }
        out
    }

    /// Grid points with `0 < |m|` as fit points `(|m|, density)`. With
    /// `symmetrize` both signs contribute; otherwise only `m > 0`.
    pub fn fit_points(&self, symmetrize: bool) -> Vec<FitPoint> {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, m)| **m > 0.0 || (symmetrize && **m < 0.0))
            .map(|(i, m)| FitPoint {
                v: m.abs(),
                density: self.density(i),
                weight: 1.0,
            })
            .collect()
    }

    /// `density = kappa log|m| + offset` over `window`.
    pub fn fit_log(&self, window: (f64, f64), symmetrize: bool) -> Result<LogFit> {
        if !(window.0 > 0.0 && window.1 > window.0 && window.1 <= 1.0) {
            return Err(Error::invalid(format!(
                "fit window ({}, {}) must satisfy 0 < lo < hi <= 1",
                window.0, window.1
            )));
        }
        fit_log_points(&self.fit_points(symmetrize), window)
    }

    /// Infrared cutoff of a fitted log law: the `|m|` at which
    /// `kappa log|m| + offset` reaches the finite density observed at `m = 0`.
    pub fn ir_cutoff(&self, fit: &LogFit) -> Result<f64> {
        if !(fit.kappa < 0.0) {
            return Err(Error::DomainError(format!(
                "no divergence to cut off (kappa = {})",
                fit.kappa
            )));
        }
        let centre = self
            .values
            .iter()
            .position(|m| *m == 0.0)
            .ok_or_else(|| Error::invalid("grid lacks m = 0"))?;
        Ok(((self.density(centre) - fit.offset) / fit.kappa).exp())
    }
}

/// Eigenbasis of the measured spin component, reusable across Hamiltonians
/// of the same `S`.
#[derive(Clone, Debug)]
pub struct ObservableBasis {
    observable: QuantumObservable,
    s: u32,
    decomposition: SpectralDecomposition<f64>,
}

impl ObservableBasis {
    pub fn new(s: u32, observable: QuantumObservable) -> Result<Self> {
        if s == 0 {
            return Err(Error::invalid("spin must be at least 1"));
        }
        let op = spin_operator::<f64>(s as f64, observable.axis())?;
        let decomposition = eigendecompose(&op)?;
        Ok(Self {
            observable,
            s,
            decomposition,
        })
    }

    pub fn observable(&self) -> QuantumObservable {
        self.observable
    }

    pub fn spin(&self) -> u32 {
        self.s
    }

    /// `<m_j | psi>` for every eigenvector `j` and real `psi`.
    fn overlaps(&self, psi: &[f64], re: &mut [f64], im: &mut [f64]) {
        let d = &self.decomposition;
        let n = d.dim();
        for j in 0..n {
            let u = d.vector(j);
            if d.is_gauged() {
                // conj((-i)^a) = i^a: even a feed the real part, odd a the imaginary.
                let (mut r, mut i) = (0.0, 0.0);
                for a in 0..n {
                    let x = u[a] * psi[a];
                    match a % 4 {
                        0 => r += x,
                        1 => i += x,
                        2 => r -= x,
                        _ => i -= x,
                    }
                }
                re[j] = r;
                im[j] = i;
            } else {
                re[j] = u.iter().zip(psi).map(|(a, b)| a * b).sum();
                im[j] = 0.0;
            }
        }
    }
}

/// Diagonal-ensemble distribution after quenching `|S_z = 0>` into
/// `H(mu, J, alpha, beta)`.
///
/// `P(m) = sum_B |sum_{k in B} c_k <m|E_k>|^2` where `B` runs over blocks of
/// degenerate eigenvalues and `c_k = <E_k|S_z = 0>`. For a nondegenerate
/// spectrum this is `sum_k |c_k|^2 |<m|E_k>|^2`.
pub fn quench_distribution(
    s: u32,
    mu: f64,
    j: f64,
    alpha: f64,
    beta: f64,
    observable: QuantumObservable,
) -> Result<QuenchDistribution> {
    let basis = ObservableBasis::new(s, observable)?;
    quench_distribution_in(&basis, mu, j, alpha, beta)
}

/// [`quench_distribution`] with a precomputed observable basis.
pub fn quench_distribution_in(
    basis: &ObservableBasis,
    mu: f64,
    j: f64,
    alpha: f64,
    beta: f64,
) -> Result<QuenchDistribution> {
    for (v, what) in [(mu, "mu"), (j, "J"), (alpha, "alpha"), (beta, "beta")] {
        if !v.is_finite() {
            return Err(Error::invalid(format!("{what} must be finite")));
        }
    }
    let s = basis.s;
    let h = build_hamiltonian::<f64>(s as f64, mu, j, alpha, beta)?;
    let eig = eigendecompose(&h)?;
    let n = eig.dim();
    let zero = s as usize;
    let threshold = DEGENERACY * eig.norm().max(f64::MIN_POSITIVE);

    let mut p = vec![0.0; n];
    let mut re = vec![0.0; n];
    let mut im = vec![0.0; n];
    let mut acc_re = vec![0.0; n];
    let mut acc_im = vec![0.0; n];
    let energies = eig.eigenvalues();
    let mut k = 0;
    while k < n {
        let mut end = k + 1;
        while end < n && energies[end] - energies[end - 1] < threshold {
            end += 1;
        }
        acc_re.iter_mut().for_each(|x| *x = 0.0);
        acc_im.iter_mut().for_each(|x| *x = 0.0);
        let mut any = false;
        for kk in k..end {
            let v = eig.vector(kk);
            let c = v[zero];
            if c * c < NEGLIGIBLE_WEIGHT {
                continue;
            }
            any = true;
            basis.overlaps(v, &mut re, &mut im);
            for jj in 0..n {
                acc_re[jj] += c * re[jj];
                acc_im[jj] += c * im[jj];
            }
        }
        if any {
            for jj in 0..n {
                p[jj] += acc_re[jj] * acc_re[jj] + acc_im[jj] * acc_im[jj];
            }
        }
        k = end;
    }
    let sf = s as f64;
    // Observable eigenvalues ascend, so index j is m = (j - S) / S.
    let values = (0..n).map(|i| (i as f64 - sf) / sf).collect();
    Ok(QuenchDistribution {
        observable: basis.observable,
        s,
        values,
        probabilities: p,
    })
}

/// Exponent `gamma` of `P ~ (1 - m_x)^gamma` near `m_x = 1`.
pub fn mx_tail_exponent(dist: &QuenchDistribution) -> Result<f64> {
    mx_tail_exponent_at(dist, 1.0)
}

/// Exponent of `P ~ |pole - m_x|^gamma` near `pole = +1` or `-1`, fitted by
/// least squares of `log P` against `log|pole - m_x|` for `|pole - m_x|` in
/// `(10/S, 0.1)`. Grid points with `P` at round-off level relative to the
/// largest in the window (alternate points vanish by parity) are skipped.
pub fn mx_tail_exponent_at(dist: &QuenchDistribution, pole: f64) -> Result<f64> {
    if dist.observable != QuantumObservable::Mx {
        return Err(Error::invalid("tail exponent needs an m_x distribution"));
    }
    if pole != 1.0 && pole != -1.0 {
        return Err(Error::invalid(format!("pole must be +1 or -1, got {pole}")));
    }
    let lo = TAIL_WINDOW.0 / dist.s as f64;
    let hi = TAIL_WINDOW.1;
    let inside: Vec<(f64, f64)> = dist
        .values
        .iter()
        .zip(&dist.probabilities)
        .map(|(m, p)| ((pole - m).abs(), *p))
        .filter(|(u, _)| *u >= lo * (1.0 - 1e-12) && *u <= hi * (1.0 + 1e-12))
        .collect();
    let peak = inside.iter().map(|x| x.1).fold(0.0, f64::max);
    let (x, y): (Vec<f64>, Vec<f64>) = inside
        .iter()
        .filter(|(_, p)| *p > 1e-12 * peak)
        .map(|(u, p)| (u.ln(), p.ln()))
        .unzip();
    if x.len() < MIN_FIT_POINTS {
        return Err(Error::InsufficientData {
            used: x.len(),
            needed: MIN_FIT_POINTS,
        });
    }
    Ok(linear_fit(&x, &y, &vec![1.0; x.len()])?.slope)
}
