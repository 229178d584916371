use quench_core::quantum::*;
use rand::{Rng, SeedableRng};

#[test]
fn diagonal_ensemble_matches_time_average() {
    for (s, j, beta, obs) in [
        (6, 0.5, 0.0, QuantumObservable::My),
        (10, 1.5, 0.0, QuantumObservable::My),
        (12, 0.5, 0.3, QuantumObservable::My),
        (10, 0.5, 0.0, QuantumObservable::Mx),
        (20, 0.7, 0.0, QuantumObservable::My),
    ] {
        let exact = quench_distribution(s, 1.0, j, 0.0, beta, obs).unwrap();
        let timed = time_averaged_distribution(s, 1.0, j, 0.0, beta, obs, 2000.0, 0.1).unwrap();
        let worst = exact
            .probabilities
            .iter()
            .zip(&timed.probabilities)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(
            worst < 1e-2,
            "S={s} J={j} beta={beta} {}: {worst}",
            obs.name()
        );
    }
}

#[test]
fn random_hamiltonians_satisfy_residual_bounds() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..6 {
        let h = build_hamiltonian::<f64>(
            50.0,
            rng.random_range(-2.0..2.0),
            rng.random_range(-2.0..2.0),
            rng.random_range(-1.0..1.0),
            if rng.random_bool(0.5) {
                rng.random_range(-1.0..1.0)
            } else {
                0.0
            },
        )
        .unwrap();
        let d = eigendecompose(&h).unwrap();
        assert!(d.max_residual(&h) <= 1e-10 * d.norm());
        assert!(d.orthogonality_error() <= 1e-10);
    }
}

#[test]
fn pauli_x_spectrum() {
    let d = eigendecompose(&spin_operator::<f64>(0.5, Axis::X).unwrap()).unwrap();
    let e: Vec<f64> = d.eigenvalues().iter().map(|x| 2.0 * x).collect();
    assert!((e[0] + 1.0).abs() < 1e-15 && (e[1] - 1.0).abs() < 1e-15);
}

#[test]
fn hamiltonians_are_exactly_symmetric() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
    for _ in 0..10 {
        let s = rng.random_range(0..30) as f64 / 2.0;
        let h = build_hamiltonian::<f64>(s, rng.random(), rng.random(), rng.random(), rng.random())
            .unwrap();
        assert!(h.is_hermitian());
        assert_eq!(h.kind(), MatrixKind::RealSymmetric);
    }
}

#[test]
fn distributions_are_normalized_and_even() {
    for j in [0.3, 0.5, 1.0, 1.5] {
        let d = quench_distribution(60, 1.0, j, 0.0, 0.0, QuantumObservable::My).unwrap();
        assert!((d.total() - 1.0).abs() < 1e-10);
        assert!(d.parity_defect() < 1e-10);
    }
}
