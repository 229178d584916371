use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

use super::spin::{MatrixKind, SpinBasisMatrix};

/// QL sweeps allowed per eigenvalue.
const MAX_SWEEPS: usize = 50;

/// Eigenpairs of a Hermitian spin-basis matrix, eigenvalues ascending.
///
/// Eigenvectors are stored column-major and normalized so that their
/// largest-magnitude component is positive. For [`MatrixKind::Imaginary`]
/// input the stored columns are real vectors `u_k` of the gauge-transformed
/// matrix; the actual eigenvectors are `(-i)^a u_k[a]`, see
/// [`SpectralDecomposition::component`].
#[derive(Clone, Debug)]
pub struct SpectralDecomposition<T> {
    eigenvalues: Vec<T>,
    vectors: Vec<T>,
    n: usize,
    gauged: bool,
}

impl<T: Real> SpectralDecomposition<T> {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn eigenvalues(&self) -> &[T] {
        &self.eigenvalues
    }

    /// Stored real column `k`.
    pub fn vector(&self, k: usize) -> &[T] {
        &self.vectors[k * self.n..(k + 1) * self.n]
    }

    pub fn is_gauged(&self) -> bool {
        self.gauged
    }

    /// Component `a` of eigenvector `k`.
    pub fn component(&self, a: usize, k: usize) -> Complex<T> {
        let u = self.vectors[k * self.n + a];
        if self.gauged {
            gauge_phase::<T>(a) * u
        } else {
            Complex::new(u, T::zero())
        }
    }

    /// Spectral norm `max |E_k|`.
    pub fn norm(&self) -> T {
        self.eigenvalues
            .iter()
            .fold(T::zero(), |m, e| m.max(e.abs()))
    }

    /// `max_k |H v_k - E_k v_k|_2`.
    pub fn max_residual(&self, h: &SpinBasisMatrix<T>) -> T {
        let n = self.n;
        let mut worst = T::zero();
        for k in 0..n {
            let mut r2 = T::zero();
            for a in 0..n {
                let mut acc = Complex::new(T::zero(), T::zero());
                for b in 0..n {
                    let hab = h.entry(a, b);
                    if hab != Complex::new(T::zero(), T::zero()) {
                        acc = acc + hab * self.component(b, k);
                    }
                }
                let r = acc - self.component(a, k) * self.eigenvalues[k];
                r2 = r2 + r.norm_sqr();
            }
            worst = worst.max(r2.sqrt());
        }
        worst
    }

    /// `max |V^T V - 1|` over the stored real columns.
    pub fn orthogonality_error(&self) -> T {
        let n = self.n;
        let mut worst = T::zero();
        for i in 0..n {
            for j in i..n {
                let d: T = self
                    .vector(i)
                    .iter()
                    .zip(self.vector(j))
                    .map(|(a, b)| *a * *b)
                    .sum();
                let target = if i == j { T::one() } else { T::zero() };
                worst = worst.max((d - target).abs());
            }
        }
        worst
    }
}

/// `(-i)^a`.
pub(crate) fn gauge_phase<T: Real>(a: usize) -> Complex<T> {
    let (o, z) = (T::one(), T::zero());
    match a % 4 {
        0 => Complex::new(o, z),
        1 => Complex::new(z, -o),
        2 => Complex::new(-o, z),
        _ => Complex::new(z, o),
    }
}

/// Diagonalizes a Hermitian spin-basis matrix.
///
/// Tridiagonal real input goes straight to implicit QL; wider real input is
/// first reduced by Householder transformations. Imaginary tridiagonal input
/// (such as `S_y`) is made real by the diagonal gauge `D = diag((-i)^a)`.
pub fn eigendecompose<T: Real>(h: &SpinBasisMatrix<T>) -> Result<SpectralDecomposition<T>> {
    let n = h.dim();
    let width = h.bandwidth();
    let (real, gauged) = match h.kind() {
        MatrixKind::RealSymmetric => (
            (0..n * n)
                .map(|i| h.stored(i / n, i % n))
                .collect::<Vec<T>>(),
            false,
        ),
        MatrixKind::Imaginary => {
            // (D^† H D)[a][b] = i^(a-b+1) data[a][b], real when |a-b| is odd.
            let mut g = vec![T::zero(); n * n];
            for a in 0..n {
                for b in 0..n {
                    let v = h.stored(a, b);
                    if v == T::zero() {
                        continue;
                    }
                    let k = (a as i64 - b as i64 + 1).rem_euclid(4);
                    g[a * n + b] = match k {
                        0 => v,
                        2 => -v,
                        _ => {
                            return Err(Error::invalid(
                                "imaginary matrix is not real in the diagonal gauge",
                            ))
                        }
                    };
                }
            }
            (g, true)
        }
    };
    let (eigenvalues, vectors) = if width <= 1 {
        let d: Vec<T> = (0..n).map(|i| real[i * n + i]).collect();
        let mut e = vec![T::zero(); n];
        for i in 1..n {
            e[i] = real[i * n + i - 1];
        }
        let mut v = vec![T::zero(); n * n];
        for i in 0..n {
            v[i * n + i] = T::one();
        }
        tql2(d, e, v, n)?
    } else {
        let (d, e, v) = tred2(real, n);
        tql2(d, e, v, n)?
    };
    let mut out = SpectralDecomposition {
        eigenvalues,
        vectors,
        n,
        gauged,
    };
    fix_signs(&mut out);
    Ok(out)
}

fn fix_signs<T: Real>(s: &mut SpectralDecomposition<T>) {
    let n = s.n;
    for k in 0..n {
        let col = &mut s.vectors[k * n..(k + 1) * n];
        let mut best = 0;
        for a in 1..n {
            if col[a].abs() > col[best].abs() {
                best = a;
            }
        }
        if col[best] < T::zero() {
            col.iter_mut().for_each(|x| *x = -*x);
        }
    }
}

/// Householder reduction of a dense symmetric matrix (row-major input) to
/// tridiagonal form. Returns the diagonal, the subdiagonal in `e[1..]` and
/// the accumulated transformation, column-major.
#[allow(clippy::needless_range_loop)]
fn tred2<T: Real>(a: Vec<T>, n: usize) -> (Vec<T>, Vec<T>, Vec<T>) {
    // v[col * n + row]; the input is symmetric so its layout is irrelevant.
    let mut v = a;
    let mut d = vec![T::zero(); n];
    let mut e = vec![T::zero(); n];
    let idx = |row: usize, col: usize| col * n + row;
    for j in 0..n {
        d[j] = v[idx(n - 1, j)];
    }
    for i in (1..n).rev() {
        let mut scale = T::zero();
        let mut h = T::zero();
        for k in 0..i {
            scale = scale + d[k].abs();
        }
        if scale == T::zero() {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[idx(i - 1, j)];
                v[idx(i, j)] = T::zero();
                v[idx(j, i)] = T::zero();
            }
        } else {
            for k in 0..i {
                d[k] = d[k] / scale;
                h = h + d[k] * d[k];
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > T::zero() {
                g = -g;
            }
            e[i] = scale * g;
            h = h - f * g;
            d[i - 1] = f - g;
            for j in 0..i {
                e[j] = T::zero();
            }
            for j in 0..i {
                f = d[j];
                v[idx(j, i)] = f;
                g = e[j] + v[idx(j, j)] * f;
                for k in j + 1..i {
                    g = g + v[idx(k, j)] * d[k];
                    e[k] = e[k] + v[idx(k, j)] * f;
                }
                e[j] = g;
            }
            f = T::zero();
            for j in 0..i {
                e[j] = e[j] / h;
                f = f + e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] = e[j] - hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    v[idx(k, j)] = v[idx(k, j)] - (f * e[k] + g * d[k]);
                }
                d[j] = v[idx(i - 1, j)];
                v[idx(i, j)] = T::zero();
            }
        }
        d[i] = h;
    }
    for i in 0..n.saturating_sub(1) {
        v[idx(n - 1, i)] = v[idx(i, i)];
        v[idx(i, i)] = T::one();
        let h = d[i + 1];
        if h != T::zero() {
            for k in 0..=i {
                d[k] = v[idx(k, i + 1)] / h;
            }
            for j in 0..=i {
                let mut g = T::zero();
                for k in 0..=i {
                    g = g + v[idx(k, i + 1)] * v[idx(k, j)];
                }
                for k in 0..=i {
                    v[idx(k, j)] = v[idx(k, j)] - g * d[k];
                }
            }
        }
        for k in 0..=i {
            v[idx(k, i + 1)] = T::zero();
        }
    }
    for j in 0..n {
        d[j] = v[idx(n - 1, j)];
        v[idx(n - 1, j)] = T::zero();
    }
    v[idx(n - 1, n - 1)] = T::one();
    e[0] = T::zero();
    (d, e, v)
}

/// Implicit QL iterations on a symmetric tridiagonal matrix (diagonal `d`,
/// subdiagonal `e[1..]`), accumulating rotations into the column-major `v`.
/// Returns ascending eigenvalues with matching columns.
fn tql2<T: Real>(
    mut d: Vec<T>,
    mut e: Vec<T>,
    mut v: Vec<T>,
    n: usize,
) -> Result<(Vec<T>, Vec<T>)> {
    if n == 0 {
        return Ok((d, v));
    }
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = T::zero();
    let mut f = T::zero();
    let mut tst1 = T::zero();
    let eps = T::epsilon();
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            let mut sweeps = 0;
            loop {
                sweeps += 1;
                if sweeps > MAX_SWEEPS {
                    return Err(Error::NoConvergence { index: l });
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (T::lit(2.0) * e[l]);
                let mut r = p.hypot(T::one());
                if p < T::zero() {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di = *di - h;
                }
                f = f + h;

                p = d[m];
                let mut c = T::one();
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = T::zero();
                let mut s2 = T::zero();
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    let (left, right) = v.split_at_mut((i + 1) * n);
                    let vi = &mut left[i * n..];
                    let vi1 = &mut right[..n];
                    for (a, b) in vi.iter_mut().zip(vi1.iter_mut()) {
                        let hk = *b;
                        *b = s * *a + c * hk;
                        *a = c * *a - s * hk;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] = d[l] + f;
        e[l] = T::zero();
    }
    // Selection sort, swapping whole columns.
    for i in 0..n.saturating_sub(1) {
        let mut k = i;
        for j in i + 1..n {
            if d[j] < d[k] {
                k = j;
            }
        }
        if k != i {
            d.swap(i, k);
            for r in 0..n {
                v.swap(i * n + r, k * n + r);
            }
        }
    }
    Ok((d, v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{build_hamiltonian, spin_operator, Axis};
    use rand::{Rng, SeedableRng};

    #[test]
    fn diagonal_input() {
        let h = build_hamiltonian::<f64>(1.0, 1.0, 0.0, 0.0, 0.0).unwrap();
        let s = eigendecompose(&h).unwrap();
        assert_eq!(s.eigenvalues(), &[0.0, 1.0, 1.0]);
        assert_eq!(s.vector(0), &[0.0, 1.0, 0.0]);
        assert_eq!(s.vector(1), &[1.0, 0.0, 0.0]);
        assert_eq!(s.vector(2), &[0.0, 0.0, 1.0]);
    }

    #[test]
    fn pauli_x() {
        let h = spin_operator::<f64>(0.5, Axis::X).unwrap();
        let s = eigendecompose(&h).unwrap();
        // S_x = sigma_x / 2.
        assert!((s.eigenvalues()[0] + 0.5).abs() < 1e-15);
        assert!((s.eigenvalues()[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn spin_one_hopping_spectrum() {
        let h = build_hamiltonian::<f64>(1.0, 0.0, 0.5, 0.0, 0.0).unwrap();
        let s = eigendecompose(&h).unwrap();
        for (e, want) in s.eigenvalues().iter().zip([-1.0, 0.0, 1.0]) {
            assert!((e - want).abs() < 1e-14);
        }
    }

    #[test]
    fn sign_convention() {
        let h = build_hamiltonian::<f64>(6.0, 1.0, 0.4, 0.0, 0.0).unwrap();
        let s = eigendecompose(&h).unwrap();
        for k in 0..s.dim() {
            let col = s.vector(k);
            let big = col
                .iter()
                .cloned()
                .fold(0.0f64, |m, x| if x.abs() > m.abs() { x } else { m });
            assert!(big > 0.0);
        }
    }

    #[test]
    fn random_lmg_residuals() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..4 {
            let (mu, j, alpha, beta) = (
                rng.random_range(-2.0..2.0),
                rng.random_range(-2.0..2.0),
                rng.random_range(-0.5..0.5),
                rng.random_range(-1.0..1.0),
            );
            for b in [0.0, beta] {
                let h = build_hamiltonian::<f64>(50.0, mu, j, alpha, b).unwrap();
                let s = eigendecompose(&h).unwrap();
                let norm = s.norm();
                assert!(
                    s.max_residual(&h) <= 1e-10 * norm,
                    "residual {}",
                    s.max_residual(&h)
                );
                assert!(s.orthogonality_error() <= 1e-10);
                assert!(s.eigenvalues().windows(2).all(|w| w[0] <= w[1]));
            }
        }
    }

    #[test]
    fn imaginary_matrix_via_gauge() {
        let sy = spin_operator::<f64>(3.0, Axis::Y).unwrap();
        let s = eigendecompose(&sy).unwrap();
        assert!(s.is_gauged());
        for (k, e) in s.eigenvalues().iter().enumerate() {
            assert!((e - (k as f64 - 3.0)).abs() < 1e-12);
        }
        assert!(s.max_residual(&sy) < 1e-12);
    }

    #[test]
    fn single_precision_residual() {
        let h = build_hamiltonian::<f32>(20.0, 1.0, 0.5, 0.0, 0.2).unwrap();
        let s = eigendecompose(&h).unwrap();
        assert!(s.max_residual(&h) <= 1e-4 * s.norm());
    }
}
