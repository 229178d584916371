use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
    Z,
}

/// How the stored real entries map to the Hermitian matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MatrixKind {
    /// `H[a][b] = data[a][b]`, symmetric.
    RealSymmetric,
    /// `H[a][b] = i * data[a][b]`, `data` antisymmetric (e.g. `S_y`).
    Imaginary,
}

/// Hermitian operator on the spin-`S` multiplet in the `S_z` basis.
///
/// Row/column `a` corresponds to `m = S - a`, so `S_z` is
/// `diag(S, S-1, ..., -S)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpinBasisMatrix<T> {
    two_s: u32,
    kind: MatrixKind,
    data: Vec<T>,
}

fn two_s_of(s: f64) -> Result<u32> {
    let two = 2.0 * s;
    if !(s >= 0.0) || two.fract() != 0.0 || two > 1e6 {
        return Err(Error::invalid(format!(
            "spin {s} is not a non-negative multiple of 1/2"
        )));
    }
    Ok(two as u32)
}

impl<T: Real> SpinBasisMatrix<T> {
    pub fn zeros(s: f64, kind: MatrixKind) -> Result<Self> {
        let two_s = two_s_of(s)?;
        let n = two_s as usize + 1;
        Ok(Self {
            two_s,
            kind,
            data: vec![T::zero(); n * n],
        })
    }

    pub fn dim(&self) -> usize {
        self.two_s as usize + 1
    }

    pub fn spin(&self) -> f64 {
        self.two_s as f64 / 2.0
    }

    /// Magnetic quantum number of basis index `a`.
    pub fn m_of(&self, a: usize) -> f64 {
        self.spin() - a as f64
    }

    pub fn kind(&self) -> MatrixKind {
        self.kind
    }

    /// Stored real entry; the matrix element is this times `i` for
    /// [`MatrixKind::Imaginary`].
    #[inline]
    pub fn stored(&self, a: usize, b: usize) -> T {
        self.data[a * self.dim() + b]
    }

    #[inline]
    pub(crate) fn set(&mut self, a: usize, b: usize, v: T) {
        let n = self.dim();
        self.data[a * n + b] = v;
    }

    pub fn entry(&self, a: usize, b: usize) -> Complex<T> {
        let v = self.stored(a, b);
        match self.kind {
            MatrixKind::RealSymmetric => Complex::new(v, T::zero()),
            MatrixKind::Imaginary => Complex::new(T::zero(), v),
        }
    }

    /// Largest `|a - b|` with a nonzero entry.
    pub fn bandwidth(&self) -> usize {
        let n = self.dim();
        let mut w = 0;
        for a in 0..n {
            for b in 0..n {
                if self.data[a * n + b] != T::zero() {
                    w = w.max(a.abs_diff(b));
                }
            }
        }
        w
    }

    /// Exact check of `H[a][b] == conj(H[b][a])`.
    pub fn is_hermitian(&self) -> bool {
        let n = self.dim();
        (0..n).all(|a| {
            (0..n).all(|b| match self.kind {
                MatrixKind::RealSymmetric => self.stored(a, b) == self.stored(b, a),
                MatrixKind::Imaginary => self.stored(a, b) == -self.stored(b, a),
            })
        })
    }

    pub fn to_dense_complex(&self) -> Vec<Complex<T>> {
        let n = self.dim();
        (0..n * n).map(|i| self.entry(i / n, i % n)).collect()
    }
}

/// `<m+1| S_+ |m>` for basis index `a` (`m = S - a`, `a >= 1`).
fn ladder<T: Real>(s: f64, a: usize) -> T {
    let m = s - a as f64;
    T::lit((s * (s + 1.0) - m * (m + 1.0)).sqrt())
}

/// Spin component along `axis` from the ladder operators.
pub fn spin_operator<T: Real>(s: f64, axis: Axis) -> Result<SpinBasisMatrix<T>> {
    let kind = if axis == Axis::Y {
        MatrixKind::Imaginary
    } else {
        MatrixKind::RealSymmetric
    };
    let mut op = SpinBasisMatrix::zeros(s, kind)?;
    let n = op.dim();
    let half = T::lit(0.5);
    match axis {
        Axis::Z => {
            for a in 0..n {
                op.set(a, a, T::lit(op.m_of(a)));
            }
        }
        Axis::X => {
            for a in 1..n {
                let v = half * ladder::<T>(s, a);
                op.set(a - 1, a, v);
                op.set(a, a - 1, v);
            }
        }
        Axis::Y => {
            // S_y = (S_+ - S_-) / 2i: the (m+1, m) element is -i/2 <m+1|S_+|m>.
            for a in 1..n {
                let v = half * ladder::<T>(s, a);
                op.set(a - 1, a, -v);
                op.set(a, a - 1, v);
            }
        }
    }
    Ok(op)
}

/// `H = (mu/S) S_z^2 + 2 J S_x + alpha S_z + (beta/S) S_x^2`.
pub fn build_hamiltonian<T: Real>(
    s: f64,
    mu: T,
    j: T,
    alpha: T,
    beta: T,
) -> Result<SpinBasisMatrix<T>> {
    let mut h = SpinBasisMatrix::zeros(s, MatrixKind::RealSymmetric)?;
    if s == 0.0 {
        return Ok(h);
    }
    let n = h.dim();
    let st = T::lit(s);
    let sx = spin_operator::<T>(s, Axis::X)?;
    for a in 0..n {
        let m = T::lit(h.m_of(a));
        h.set(a, a, mu / st * m * m + alpha * m);
    }
    let two = T::lit(2.0);
    for a in 1..n {
        let v = two * j * sx.stored(a - 1, a);
        h.set(a - 1, a, v);
        h.set(a, a - 1, v);
    }
    if beta != T::zero() {
        let c = beta / st;
        // (S_x^2)[a][b] = sum_k S_x[a][k] S_x[k][b], nonzero for |a-b| in {0, 2}.
        for a in 0..n {
            for b in a.saturating_sub(2)..(a + 3).min(n) {
                let lo = a.min(b).saturating_sub(1);
                let hi = (a.max(b) + 2).min(n);
                let mut acc = T::zero();
                for k in lo..hi {
                    acc = acc + sx.stored(a, k) * sx.stored(k, b);
                }
                if acc != T::zero() {
                    h.set(a, b, h.stored(a, b) + c * acc);
                }
            }
        }
        // Enforce exact symmetry after the floating-point sums.
        for a in 0..n {
            for b in 0..a {
                let v = h.stored(a, b);
                h.set(b, a, v);
            }
        }
    }
    Ok(h)
}
