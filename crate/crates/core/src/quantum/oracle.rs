use num_complex::Complex64;

use crate::error::{Error, Result};

use super::quench::{QuantumObservable, QuenchDistribution};
use super::spin::{build_hamiltonian, spin_operator, Axis, SpinBasisMatrix};

/// Largest spin accepted by the dense brute-force path.
pub const BRUTE_FORCE_MAX_SPIN: u32 = 20;

type Dense = Vec<Complex64>;

fn matmul(a: &Dense, b: &Dense, n: usize) -> Dense {
    let mut c = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for k in 0..n {
            let x = a[i * n + k];
            if x.re == 0.0 && x.im == 0.0 {
                continue;
            }
            for j in 0..n {
                c[i * n + j] += x * b[k * n + j];
            }
        }
    }
    c
}

fn matvec(a: &Dense, v: &[Complex64], n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|i| (0..n).map(|k| a[i * n + k] * v[k]).sum())
        .collect()
}

/// `exp(z A)` by scaling and squaring a truncated Taylor series.
fn expm(a: &SpinBasisMatrix<f64>, z: Complex64) -> Dense {
    let n = a.dim();
    let mut m: Dense = a.to_dense_complex().into_iter().map(|x| x * z).collect();
    let norm = (0..n)
        .map(|i| (0..n).map(|j| m[i * n + j].norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let scale = 0.5f64.powi(squarings as i32);
    m.iter_mut().for_each(|x| *x *= scale);
    let mut result: Dense = vec![Complex64::new(0.0, 0.0); n * n];
    let mut term = result.clone();
    for i in 0..n {
        result[i * n + i] = Complex64::new(1.0, 0.0);
        term[i * n + i] = Complex64::new(1.0, 0.0);
    }
    for k in 1..=24 {
        term = matmul(&term, &m, n);
        let inv = 1.0 / k as f64;
        term.iter_mut().for_each(|x| *x *= inv);
        result.iter_mut().zip(&term).for_each(|(r, t)| *r += t);
    }
    for _ in 0..squarings {
        result = matmul(&result, &result, n);
    }
    result
}

/// Finite-time average of `|<m|psi(t)>|^2` over samples `t = 0, dt, ..., tau`
/// with `psi(0) = |S_z = 0>`.
///
/// Dense propagation, intended as an independent check of the diagonal
/// ensemble for small spins. The observable eigenstates come from rotating
/// `S_z` eigenstates: `|S_y = m> = exp(i pi S_x / 2)|S_z = m>` and
/// `|S_x = m> = exp(-i pi S_y / 2)|S_z = m>`.
#[allow(clippy::too_many_arguments)]
pub fn time_averaged_distribution(
    s: u32,
    mu: f64,
    j: f64,
    alpha: f64,
    beta: f64,
    observable: QuantumObservable,
    tau: f64,
    dt: f64,
) -> Result<QuenchDistribution> {
    if s == 0 || s > BRUTE_FORCE_MAX_SPIN {
        return Err(Error::invalid(format!(
            "brute-force oracle needs 1 <= S <= {BRUTE_FORCE_MAX_SPIN}"
        )));
    }
    if !(dt > 0.0 && tau >= 0.0) {
        return Err(Error::invalid("dt must be positive and tau non-negative"));
    }
    let n = 2 * s as usize + 1;
    let h = build_hamiltonian::<f64>(s as f64, mu, j, alpha, beta)?;
    let step = expm(&h, Complex64::new(0.0, -dt));
    let half_pi = std::f64::consts::FRAC_PI_2;
    let rotation = match observable {
        QuantumObservable::My => expm(
            &spin_operator::<f64>(s as f64, Axis::X)?,
            Complex64::new(0.0, half_pi),
        ),
        QuantumObservable::Mx => expm(
            &spin_operator::<f64>(s as f64, Axis::Y)?,
            Complex64::new(0.0, -half_pi),
        ),
    };
    // Row-major: column a of `rotation` is the eigenstate with S_z index a,
    // i.e. m = S - a. Store rows of R^dagger for the overlaps.
    let mut psi = vec![Complex64::new(0.0, 0.0); n];
    psi[s as usize] = Complex64::new(1.0, 0.0);
    let samples = (tau / dt).round() as usize + 1;
    let mut acc = vec![0.0; n];
    for k in 0..samples {
        if k > 0 {
            psi = matvec(&step, &psi, n);
        }
        for a in 0..n {
            let amp: Complex64 = (0..n).map(|b| rotation[b * n + a].conj() * psi[b]).sum();
            acc[a] += amp.norm_sqr();
        }
    }
    let sf = s as f64;
    // S_z index a has m = S - a; report on the ascending grid.
    let probabilities = (0..n).map(|i| acc[n - 1 - i] / samples as f64).collect();
    let values = (0..n).map(|i| (i as f64 - sf) / sf).collect();
    Ok(QuenchDistribution {
        observable,
        s,
        values,
        probabilities,
    })
}
