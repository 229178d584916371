//! End-to-end acceptance checks. Prints one `criterion N: PASS|FAIL` line per
//! criterion and exits nonzero if any criterion outside `KNOWN_FAILURES`
//! fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use num_complex::Complex;
use quench_core::models::{build_initial_ensemble, InitialCondition, LmgParams, ModelSpec};
use quench_core::phase::{Evolution, Observable, StepKind, StepScheme, TimeAveragedHistogram};
use quench_core::quantum::{
    build_hamiltonian, eigendecompose, quench_distribution, spin_operator,
    time_averaged_distribution, Axis, QuantumObservable,
};
use quench_core::stats::{fit_log_points, FitPoint};
use quench_lab::config::ExperimentConfig;
use quench_lab::experiments::{run, Experiment, Outcome};
use serde_json::Value;

/// Criteria that do not pass with the current models; see the README.
const KNOWN_FAILURES: &[u32] = &[8, 9, 10];

type Criterion = fn() -> Result<Check, String>;

struct Check {
    ok: bool,
    detail: String,
}

fn num(o: &Outcome, key: &str) -> f64 {
    o.summary
        .get(key)
        .and_then(Value::as_f64)
        .unwrap_or(f64::NAN)
}

fn list(o: &Outcome, key: &str) -> Vec<f64> {
    o.summary
        .get(key)
        .and_then(Value::as_array)
        .map(|a| a.iter().map(|v| v.as_f64().unwrap_or(f64::NAN)).collect())
        .unwrap_or_default()
}

fn within(x: f64, want: f64, rel: f64) -> bool {
    ((x - want) / want).abs() <= rel
}

fn timed(
    e: Experiment,
    edit: impl FnOnce(&mut ExperimentConfig),
) -> Result<(Outcome, f64), String> {
    let mut c = e.defaults();
    edit(&mut c);
    let start = Instant::now();
    let o = run(e, &c).map_err(|err| format!("{} failed: {err}", e.name()))?;
    Ok((o, start.elapsed().as_secs_f64()))
}

fn c1() -> Result<Check, String> {
    let (o, secs) = timed(Experiment::AppA, |_| {})?;
    let sup = num(&o, "sup_norm_relative");
    let ratio = num(&o, "kappa_over_theory");
    Ok(Check {
        ok: sup < 0.03 && within(ratio, 1.0, 0.05) && secs < 60.0,
        detail: format!(
            "sup-norm {:.4}, kappa/theory {:.4}, {secs:.0} s",
            sup, ratio
        ),
    })
}

fn c2() -> Result<Check, String> {
    let (o, secs) = timed(Experiment::Fig1, |c| c.snapshot_times = None)?;
    let k = num(&o, "kappa_pi2");
    let off = num(&o, "offset");
    Ok(Check {
        ok: within(k, -1.0, 0.10) && (off - 0.17).abs() <= 0.03 && secs < 120.0,
        detail: format!("kappa*pi^2 {k:.4}, offset {off:.4}, {secs:.0} s"),
    })
}

fn c3() -> Result<Check, String> {
    let (o, secs) = timed(Experiment::Fig2a, |c| c.grid = Some(vec![0.5, 1.5]))?;
    let k = list(&o, "kappa_pi2");
    let ratio = k[1] / k[0];
    Ok(Check {
        ok: within(k[0], -1.0, 0.15) && (ratio - 2.0).abs() <= 0.3 && secs < 1200.0,
        detail: format!(
            "kappa*pi^2 at J=0.5 {:.4}, kappa(1.5)/kappa(0.5) {ratio:.3}, {secs:.0} s",
            k[0]
        ),
    })
}

fn c4() -> Result<Check, String> {
    let (o, secs) = timed(Experiment::AppC, |_| {})?;
    let k = list(&o, "kappa_pi2");
    let cut = list(&o, "ir_cutoff_times_s");
    let spread = |v: &[f64]| {
        v.iter().copied().fold(f64::MIN, f64::max) / v.iter().copied().fold(f64::MAX, f64::min)
    };
    let mean = k.iter().sum::<f64>() / k.len() as f64;
    let k_ok = k.iter().all(|x| within(*x, mean, 0.15));
    Ok(Check {
        ok: k_ok && spread(&cut) <= 1.5,
        detail: format!(
            "kappa*pi^2 {k:.3?}, S * cutoff {cut:.3?} (spread {:.2}), {secs:.0} s",
            spread(&cut)
        ),
    })
}

fn c5() -> Result<Check, String> {
    let (o, secs) = timed(Experiment::AppD, |_| {})?;
    let e = num(&o, "tail_exponent");
    Ok(Check {
        ok: (e + 0.5).abs() <= 0.1,
        detail: format!("exponent {e:.3} at m_x = -1, {secs:.0} s"),
    })
}

fn c6() -> Result<Check, String> {
    let (o, secs) = timed(Experiment::Fig2b, |c| c.grid = Some(vec![0.5, 0.8, 1.2]))?;
    let r = list(&o, "kappa_over_theory");
    let k = o
        .sweep
        .as_ref()
        .map(|s| s.kappa.clone())
        .unwrap_or_default();
    Ok(Check {
        ok: within(r[0], 1.0, 0.15)
            && within(r[1], 1.0, 0.15)
            && k[2].abs() < 0.02
            && secs < 1800.0,
        detail: format!(
            "kappa/theory {:.3} {:.3}, |kappa| at 1.2 {:.4}, {secs:.0} s",
            r[0],
            r[1],
            k[2].abs()
        ),
    })
}

fn c7() -> Result<Check, String> {
    let (o, secs) = timed(Experiment::Fig2c, |_| {})?;
    let r = list(&o, "kappa_over_theory");
    let k = o
        .sweep
        .as_ref()
        .map(|s| s.kappa.clone())
        .unwrap_or_default();
    let ok = r[..5].iter().all(|x| within(*x, 1.0, 0.2)) && k[5].abs() < 0.02;
    Ok(Check {
        ok,
        detail: format!(
            "kappa/theory {:.3?}, |kappa| at K=5 {:.4}, {secs:.0} s",
            &r[..5],
            k[5].abs()
        ),
    })
}

fn c8() -> Result<Check, String> {
    let (o, secs) = timed(Experiment::Fig3, |_| {})?;
    let r = list(&o, "kappa_over_theory");
    Ok(Check {
        ok: r.iter().all(|x| within(*x, 1.0, 0.1)),
        detail: format!("kappa/theory at tau 5,10,20,30: {r:.3?}, {secs:.0} s"),
    })
}

fn c9() -> Result<Check, String> {
    let (o, secs) = timed(Experiment::Fig4, |_| {})?;
    let sup = num(&o, "sup_norm_relative");
    let k = num(&o, "kappa");
    Ok(Check {
        ok: sup < 0.1 && k.abs() < 0.02,
        detail: format!("sup-norm {sup:.4}, kappa {k:.4}, {secs:.0} s"),
    })
}

fn c10() -> Result<Check, String> {
    let (a, s1) = timed(Experiment::AppG, |_| {})?;
    let (b, s2) = timed(Experiment::AppG, |c| {
        let m = c.model.as_mut().expect("model");
        m.alpha = Some(0.0);
        m.beta = Some(0.5);
    })?;
    let ka = num(&a, "kappa");
    let kb = num(&b, "kappa_pi2");
    Ok(Check {
        ok: ka.abs() < 0.02 && within(kb, -1.0, 0.15),
        detail: format!(
            "|kappa| at alpha=0.1 {:.4}, kappa*pi^2 at beta=0.5 {kb:.4}, {:.0} s",
            ka.abs(),
            s1 + s2
        ),
    })
}

fn matmul(a: &[Complex<f64>], b: &[Complex<f64>], n: usize) -> Vec<Complex<f64>> {
    let mut c = vec![Complex::new(0.0, 0.0); n * n];
    for i in 0..n {
        for k in 0..n {
            for j in 0..n {
                c[i * n + j] += a[i * n + k] * b[k * n + j];
            }
        }
    }
    c
}

fn c11() -> Result<Check, String> {
    let e = |err: quench_core::Error| err.to_string();
    let mut parts = Vec::new();
    let mut ok = true;

    // Diagonal ensemble against a long explicit time average.
    let mut dev: f64 = 0.0;
    for (s, j) in [(8, 0.5), (14, 1.5), (20, 0.7)] {
        let a = quench_distribution(s, 1.0, j, 0.0, 0.0, QuantumObservable::My).map_err(e)?;
        let b = time_averaged_distribution(s, 1.0, j, 0.0, 0.0, QuantumObservable::My, 2000.0, 0.1)
            .map_err(e)?;
        dev = a
            .probabilities
            .iter()
            .zip(&b.probabilities)
            .map(|(x, y)| (x - y).abs())
            .fold(dev, f64::max);
    }
    ok &= dev < 1e-2;
    parts.push(format!("brute force {dev:.1e}"));

    // [S_x, S_y] = i S_z.
    let s = 12.5;
    let [x, y, z] = [Axis::X, Axis::Y, Axis::Z]
        .map(|a| spin_operator::<f64>(s, a).map(|m| m.to_dense_complex()));
    let (x, y, z) = (x.map_err(e)?, y.map_err(e)?, z.map_err(e)?);
    let n = (2.0 * s) as usize + 1;
    let (xy, yx) = (matmul(&x, &y, n), matmul(&y, &x, n));
    let comm = (0..n * n)
        .map(|i| (xy[i] - yx[i] - Complex::new(0.0, 1.0) * z[i]).norm())
        .fold(0.0, f64::max);
    ok &= comm < 1e-12;
    parts.push(format!("commutator {comm:.1e}"));

    let h = build_hamiltonian::<f64>(200.0, 1.0, 0.5, 0.1, 0.3).map_err(e)?;
    let d = eigendecompose(&h).map_err(e)?;
    let res = d.max_residual(&h) / d.norm();
    ok &= res < 1e-10;
    parts.push(format!("eigen residual {res:.1e}"));

    // Merging partial histograms reproduces joint accumulation.
    let mut joint = TimeAveragedHistogram::new(-1.0, 1.0, 33).map_err(e)?;
    let (mut p, mut q) = (joint.empty_like(), joint.empty_like());
    for i in 0..500 {
        let v = ((i * 37) % 211) as f64 / 100.0 - 1.05;
        joint.record(v, 1.0);
        if i % 3 == 0 {
            p.record(v, 1.0)
        } else {
            q.record(v, 1.0)
        }
    }
    p.merge(&q).map_err(e)?;
    let merge = (0..joint.n_bins()).all(|b| joint.density(b) == p.density(b));
    ok &= merge;
    parts.push(format!("merge exact {merge}"));

    // Thread-count independence.
    let model = ModelSpec::Lmg(
        LmgParams::new(1.0, 0.2)
            .with_damping(0.1)
            .with_temperature(0.1),
    );
    let ens = build_initial_ensemble(&InitialCondition::UniformPhaseLine, 200, 5).map_err(e)?;
    let obs = Observable::coordinate("phi", 0, -PI, PI, 50).map_err(e)?;
    let evolve = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .expect("pool");
        pool.install(|| {
            Evolution::new(
                StepScheme::new(StepKind::EulerMaruyama, 1e-2).expect("scheme"),
                5.0,
            )
            .run(&model, &ens, std::slice::from_ref(&obs))
            .map(|r| r.histograms)
        })
    };
    let one = evolve(1).map_err(e)?;
    let det = [2, 4]
        .iter()
        .all(|&t| evolve(t).map(|h| h == one).unwrap_or(false));
    ok &= det;
    parts.push(format!("thread determinism {det}"));

    // P(x) of the harmonic oscillator does not depend on m or omega0.
    let (a, _) = timed(Experiment::AppA, |c| {
        c.trajectories = Some(500);
        c.t_end = Some(40.0);
    })?;
    let inv = num(&a, "rescaled_max_difference");
    ok &= inv < 1e-3;
    parts.push(format!("m/omega0 invariance {inv:.1e}"));

    // Stretching the data by lambda shifts only the offset, by kappa log lambda.
    let (kappa, offset) = (-1.0 / (PI * PI), 0.17);
    let pts: Vec<FitPoint> = (1..200)
        .map(|i| {
            let v = i as f64 * 2e-3;
            FitPoint {
                v,
                density: kappa * v.ln() + offset,
                weight: 1.0,
            }
        })
        .collect();
    let base = fit_log_points(&pts, (0.01, 0.3)).map_err(e)?;
    let mut shift: f64 = 0.0;
    for lambda in [0.5, 2.0, 3.0] {
        let stretched: Vec<FitPoint> = pts
            .iter()
            .map(|p| FitPoint {
                v: p.v / lambda,
                ..*p
            })
            .collect();
        let f = fit_log_points(&stretched, (0.01, 0.3)).map_err(e)?;
        shift = shift
            .max((f.kappa - base.kappa).abs())
            .max((f.offset - base.offset - base.kappa * lambda.ln()).abs());
    }
    ok &= shift < 1e-9;
    parts.push(format!("fit equivariance {shift:.1e}"));

    Ok(Check {
        ok,
        detail: parts.join(", "),
    })
}

fn main() -> ExitCode {
    let criteria: [(u32, Criterion); 11] = [
        (1, c1),
        (2, c2),
        (3, c3),
        (4, c4),
        (5, c5),
        (6, c6),
        (7, c7),
        (8, c8),
        (9, c9),
        (10, c10),
        (11, c11),
    ];
    let mut unexpected = 0;
    for (n, f) in criteria {
        let check = f().unwrap_or_else(|err| Check {
            ok: false,
            detail: err,
        });
        let known = KNOWN_FAILURES.contains(&n);
        let tag = match (check.ok, known) {
            (true, false) => "PASS",
            (true, true) => "PASS (listed as a known failure)",
            (false, true) => "FAIL (known)",
            (false, false) => "FAIL",
        };
        if !check.ok && !known {
            unexpected += 1;
        }
        println!("criterion {n}: {tag} {}", check.detail);
    }
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{unexpected} criteria failed unexpectedly");
        ExitCode::FAILURE
    }
}
