//! Exact diagonalization of the spin Hamiltonian
//! `H = (mu/S) S_z^2 + 2 J S_x + alpha S_z + (beta/S) S_x^2`
//! and infinite-time averaged distributions after a quench from `|S_z = 0>`.

mod eigen;
mod oracle;
mod quench;
mod spin;

pub use eigen::{eigendecompose, SpectralDecomposition};
pub use oracle::{time_averaged_distribution, BRUTE_FORCE_MAX_SPIN};
pub use quench::{
    mx_tail_exponent, mx_tail_exponent_at, quench_distribution, quench_distribution_in,
    ObservableBasis, QuantumObservable, QuenchDistribution,
};
pub use spin::{build_hamiltonian, spin_operator, Axis, MatrixKind, SpinBasisMatrix};
