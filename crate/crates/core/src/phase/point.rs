use crate::error::{Error, Result};
use crate::scalar::Real;

/// Largest phase-space dimension among the supported models (Dicke: 4).
pub const MAX_DIM: usize = 4;

/// A point in canonical phase space with its time stamp.
///
/// The coordinate layout is defined by the model: `(x, p)` for the harmonic
/// oscillator and the kicked rotor, `(phi, n)` for the spin model and
/// `(x, p_x, y, p_y)` for the Dicke model. Storage is inline so points are
/// `Copy` and stepping never allocates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhasePoint<T> {
    coords: [T; MAX_DIM],
    dim: usize,
    pub t: T,
}

impl<T: Real> PhasePoint<T> {
    pub fn new(coords: &[T], t: T) -> Result<Self> {
        if coords.is_empty() || coords.len() > MAX_DIM {
            return Err(Error::invalid(format!(
                "phase point dimension {} outside 1..={MAX_DIM}",
                coords.len()
            )));
        }
        let mut c = [T::zero(); MAX_DIM];
        c[..coords.len()].copy_from_slice(coords);
        Ok(Self {
            coords: c,
            dim: coords.len(),
            t,
        })
    }

    pub fn from_array<const N: usize>(coords: [T; N], t: T) -> Self {
        Self::new(&coords, t).expect("array dimension within MAX_DIM")
    }

    #[inline]
    pub(crate) fn from_raw(coords: [T; MAX_DIM], dim: usize, t: T) -> Self {
        Self { coords, dim, t }
    }

    #[inline]
    pub fn coords(&self) -> &[T] {
        &self.coords[..self.dim]
    }

    #[inline]
    pub fn coords_mut(&mut self) -> &mut [T] {
        &mut self.coords[..self.dim]
    }

    #[inline]
    pub(crate) fn raw(&self) -> &[T; MAX_DIM] {
        &self.coords
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn is_finite(&self) -> bool {
        self.coords().iter().all(|c| c.is_finite()) && self.t.is_finite()
    }

    /// Largest absolute coordinate.
    pub fn max_abs(&self) -> T {
        self.coords().iter().fold(T::zero(), |m, c| m.max(c.abs()))
    }
}

impl<T: Real> std::ops::Index<usize> for PhasePoint<T> {
    type Output = T;

    fn index(&self, i: usize) -> &T {
        &self.coords()[i]
    }
}
