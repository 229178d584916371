//! The experiment catalog: defaults, validation and the runs themselves.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Mutex;

use quench_core::models::{
    build_initial_ensemble, DickeParams, InitialCondition, LmgParams, ModelSpec,
};
use quench_core::phase::{
    fmt17, iterate_map_ensemble, DivergencePolicy, Evolution, Observable, PhasePoint, StepKind,
    StepScheme, TimeAveragedHistogram,
};
use quench_core::quantum::{
    mx_tail_exponent, mx_tail_exponent_at, quench_distribution_in, ObservableBasis,
    QuantumObservable, QuenchDistribution,
};
use quench_core::stats::{
    dissipative_prefactor, fit_log_divergence, harmonic_marginal_bin_average, kappa_sweep,
    BoltzmannReference, KappaSweep, LogFit,
};
use quench_core::{Error, Real};
use serde_json::{json, Map, Value};

use crate::config::{ExperimentConfig, ModelConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Experiment {
    Fig1,
    Fig2a,
    Fig2b,
    Fig2c,
    Fig3,
    Fig4,
    AppA,
    AppC,
    AppD,
    AppG,
    Custom,
}

/// `(experiment, source figure, description)`.
pub const CATALOG: &[(Experiment, &str, &str)] = &[
    (
        Experiment::Fig1,
        "Figure 1",
        "semiclassical spin model after the quench: P(phi) and phase-space snapshots",
    ),
    (
        Experiment::Fig2a,
        "Figure 2a",
        "quantum spin model, S=1000: kappa across J/mu from the diagonal ensemble",
    ),
    (
        Experiment::Fig2b,
        "Figure 2b",
        "semiclassical Dicke model: kappa across lambda/lambda_c",
    ),
    (
        Experiment::Fig2c,
        "Figure 2c",
        "kicked rotor (standard map): kappa across K",
    ),
    (
        Experiment::Fig3,
        "Figure 3",
        "damped spin model: kappa of the time average up to tau",
    ),
    (
        Experiment::Fig4,
        "Figure 4",
        "damped spin model with thermal noise against the Boltzmann density",
    ),
    (
        Experiment::AppA,
        "Appendix A",
        "harmonic oscillator: closed-form marginal and mass/frequency invariance",
    ),
    (
        Experiment::AppC,
        "Appendix C",
        "quantum finite-size study: kappa and infrared cutoff across S",
    ),
    (
        Experiment::AppD,
        "Appendix D",
        "quantum m_x distribution: tail exponent at the stable pole",
    ),
    (
        Experiment::AppG,
        "Appendix G",
        "quantum model with the alpha S_z and beta S_x^2 perturbations",
    ),
    (
        Experiment::Custom,
        "-",
        "any single model run configured from the [model] table",
    ),
];

pub fn names() -> Vec<&'static str> {
    CATALOG.iter().map(|(e, _, _)| e.name()).collect()
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Fig1 => "fig1",
            Experiment::Fig2a => "fig2a",
            Experiment::Fig2b => "fig2b",
            Experiment::Fig2c => "fig2c",
            Experiment::Fig3 => "fig3",
            Experiment::Fig4 => "fig4",
            Experiment::AppA => "appA",
            Experiment::AppC => "appC",
            Experiment::AppD => "appD",
            Experiment::AppG => "appG",
            Experiment::Custom => "custom",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        CATALOG.iter().map(|(e, _, _)| *e).find(|e| e.name() == s)
    }

    pub fn defaults(self) -> ExperimentConfig {
        let base = ExperimentConfig {
            seed: Some(1),
            ..Default::default()
        };
        let lmg = |j: f64| ModelConfig {
            mu: Some(1.0),
            j: Some(j),
            ..Default::default()
        };
        let quantum = |observable: &str| ModelConfig {
            mu: Some(1.0),
            j: Some(0.5),
            spin: Some(1000),
            observable: Some(observable.into()),
            ..Default::default()
        };
        match self {
            Experiment::Fig1 => ExperimentConfig {
                trajectories: Some(4000),
                dt: Some(0.01),
                t_end: Some(200.0),
                burn_in: Some(0.0),
                scheme: Some("symplectic_leapfrog".into()),
                bins: Some(400),
                fit_window: Some([1e-2, 0.3]),
                snapshot_times: Some(vec![0.0, 10.0, 50.0, 200.0]),
                model: Some(lmg(0.2)),
                ..base
            },
            Experiment::Fig2a => ExperimentConfig {
                grid: Some(vec![0.25, 0.5, 0.75, 0.9, 1.1, 1.25, 1.5, 2.0]),
                model: Some(quantum("m_y")),
                ..base
            },
            Experiment::Fig2b => ExperimentConfig {
                seed: Some(3),
                trajectories: Some(4000),
                dt: Some(0.01),
                t_end: Some(100.0),
                burn_in: Some(0.0),
                scheme: Some("rk4".into()),
                bins: Some(400),
                fit_window: Some([0.02, 0.3]),
                grid: Some(vec![0.25, 0.5, 0.8, 0.9, 1.1, 1.2, 1.5]),
                model: Some(ModelConfig {
                    omega0: Some(std::f64::consts::FRAC_1_SQRT_2),
                    omega: Some(3f64.sqrt()),
                    spin_j: Some(1e6),
                    ..Default::default()
                }),
                ..base
            },
            Experiment::Fig2c => ExperimentConfig {
                trajectories: Some(10_000),
                iterations: Some(10_000),
                bins: Some(400),
                fit_window: Some([0.02, 0.3]),
                grid: Some(vec![0.5, 1.0, 2.0, 3.0, 3.5, 5.0]),
                ..base
            },
            Experiment::Fig3 => ExperimentConfig {
                trajectories: Some(4000),
                dt: Some(1e-3),
                t_end: Some(30.0),
                scheme: Some("euler_maruyama".into()),
                bins: Some(400),
                fit_window: Some([1e-2, 0.3]),
                grid: Some(vec![5.0, 10.0, 20.0, 30.0]),
                model: Some(ModelConfig {
                    eta: Some(0.1),
                    ..lmg(0.2)
                }),
                ..base
            },
            Experiment::Fig4 => ExperimentConfig {
                trajectories: Some(2000),
                dt: Some(1e-3),
                t_end: Some(200.0),
                burn_in: Some(100.0),
                scheme: Some("euler_maruyama".into()),
                bins: Some(400),
                fit_window: Some([1e-2, 0.3]),
                model: Some(ModelConfig {
                    eta: Some(0.1),
                    temperature: Some(0.1),
                    ..lmg(0.2)
                }),
                ..base
            },
            Experiment::AppA => ExperimentConfig {
                trajectories: Some(2000),
                dt: Some(0.01),
                t_end: Some(200.0),
                burn_in: Some(0.0),
                scheme: Some("symplectic_leapfrog".into()),
                bins: Some(600),
                fit_window: Some([1e-2, 0.3]),
                model: Some(ModelConfig {
                    m: Some(2.5),
                    omega0: Some(1.7),
                    x0: Some(1.0),
                    line_half_length: Some(1.5),
                    ..Default::default()
                }),
                ..base
            },
            Experiment::AppC => ExperimentConfig {
                spins: Some(vec![250, 500, 1000]),
                model: Some(quantum("m_y")),
                ..base
            },
            Experiment::AppD => ExperimentConfig {
                model: Some(quantum("m_x")),
                ..base
            },
            Experiment::AppG => ExperimentConfig {
                model: Some(ModelConfig {
                    alpha: Some(0.1),
                    beta: Some(0.0),
                    ..quantum("m_y")
                }),
                ..base
            },
            Experiment::Custom => custom_defaults("lmg").expect("lmg is a known model"),
        }
    }
}

/// Defaults for `custom` runs of the given model kind.
pub fn custom_defaults(kind: &str) -> Result<ExperimentConfig, String> {
    let mut c = match kind {
        "lmg" => {
            let mut c = Experiment::Fig1.defaults();
            c.scheme = Some("rk4".into());
            c.snapshot_times = None;
            c
        }
        "harmonic" => {
            let mut c = Experiment::AppA.defaults();
            if let Some(m) = c.model.as_mut() {
                m.m = Some(1.0);
                m.omega0 = Some(1.0);
            }
            c
        }
        "dicke" => {
            let mut c = Experiment::Fig2b.defaults();
            c.grid = None;
            if let Some(m) = c.model.as_mut() {
                m.lambda_ratio = Some(0.5);
            }
            c
        }
        "kicked_rotor" => {
            let mut c = Experiment::Fig2c.defaults();
            c.grid = None;
            c.model = Some(ModelConfig {
                k: Some(2.0),
                ..Default::default()
            });
            c
        }
        "quantum" => Experiment::AppG.defaults(),
        other => {
            return Err(format!(
            "unknown model kind '{other}'; expected harmonic, lmg, dicke, kicked_rotor or quantum"
        ))
        }
    };
    let model = c.model.get_or_insert_with(Default::default);
    model.kind = Some(kind.to_string());
    Ok(c)
}

fn kind_of(e: Experiment, c: &ExperimentConfig) -> &'static str {
    match e {
        Experiment::Fig1 | Experiment::Fig3 | Experiment::Fig4 => "lmg",
        Experiment::Fig2b => "dicke",
        Experiment::Fig2c => "kicked_rotor",
        Experiment::AppA => "harmonic",
        Experiment::Fig2a | Experiment::AppC | Experiment::AppD | Experiment::AppG => "quantum",
        Experiment::Custom => match c.model().kind.as_deref() {
            Some("harmonic") => "harmonic",
            Some("dicke") => "dicke",
            Some("kicked_rotor") => "kicked_rotor",
            Some("quantum") => "quantum",
            _ => "lmg",
        },
    }
}

/// Every violation in a merged config.
pub fn validate(e: Experiment, c: &ExperimentConfig) -> Vec<String> {
    let mut errs = Vec::new();
    let mut positive = |v: Option<f64>, what: &str| {
        if let Some(v) = v {
            if !(v > 0.0 && v.is_finite()) {
                errs.push(format!("{what} must be positive"));
            }
        }
    };
    positive(c.dt, "dt");
    positive(c.t_end, "t_end");
    let m = c.model();
    positive(m.m, "m");
    positive(m.omega0, "omega0");
    positive(m.omega, "omega");
    positive(m.spin_j, "spin_j");
    positive(m.x0, "x0");
    positive(m.line_half_length, "line_half_length");
    if c.trajectories == Some(0) {
        errs.push("trajectories must be positive".into());
    }
    if c.iterations == Some(0) {
        errs.push("iterations must be positive".into());
    }
    if c.bins == Some(0) {
        errs.push("bins must be positive".into());
    }
    if let Some(b) = c.burn_in {
        if !(b >= 0.0) {
            errs.push("burn_in must be non-negative".into());
        } else if let Some(t) = c.t_end {
            if b >= t {
                errs.push("burn_in must be smaller than t_end".into());
            }
        }
    }
    if let Some([lo, hi]) = c.fit_window {
        if !(lo > 0.0 && hi > lo && hi.is_finite()) {
            errs.push("fit_window must satisfy 0 < lo < hi".into());
        }
    }
    if let Some(s) = &c.scheme {
        match StepKind::parse(s) {
            None | Some(StepKind::DiscreteMap) => errs.push(format!(
                "unknown scheme '{s}'; expected rk4, symplectic_leapfrog, euler or euler_maruyama"
            )),
            _ => {}
        }
    }
    if let Some(g) = &c.grid {
        if g.is_empty() || g.windows(2).any(|w| !(w[1] > w[0])) || g.iter().any(|v| !v.is_finite())
        {
            errs.push("grid must be non-empty, finite and strictly ascending".into());
        }
    }
    if let Some(s) = &c.spins {
        if s.is_empty()
            || s.iter().any(|&v| v == 0 || v > 4000)
            || s.windows(2).any(|w| w[1] <= w[0])
        {
            errs.push("spins must be ascending integers in 1..=4000".into());
        }
    }
    if let Some(s) = m.spin {
        if s == 0 || s > 4000 {
            errs.push("spin must be an integer in 1..=4000".into());
        }
    }
    if let Some(o) = &m.observable {
        if o != "m_y" && o != "m_x" {
            errs.push(format!("observable must be m_y or m_x, got '{o}'"));
        }
    }
    for (v, what) in [(m.eta, "eta"), (m.temperature, "temperature"), (m.k, "k")] {
        if let Some(v) = v {
            if !(v >= 0.0 && v.is_finite()) {
                errs.push(format!("{what} must be non-negative"));
            }
        }
    }
    if e == Experiment::Fig3 {
        if let (Some(g), Some(t)) = (&c.grid, c.t_end) {
            if g.iter().any(|&tau| tau > t + 1e-12) {
                errs.push("every tau in grid must be at most t_end".into());
            }
            if g.first()
                .is_some_and(|&tau| tau <= c.burn_in.unwrap_or(0.0))
            {
                errs.push("every tau in grid must exceed burn_in".into());
            }
        }
    }
    if e == Experiment::Custom && kind_of(e, c) != c.model().kind.as_deref().unwrap_or("lmg") {
        errs.push(format!(
            "unknown model kind '{}'",
            c.model().kind.as_deref().unwrap_or("")
        ));
    }
    if let Some(ts) = &c.snapshot_times {
        if let Some(t) = c.t_end {
            if ts.iter().any(|&s| !(0.0..=t).contains(&s)) {
                errs.push("snapshot_times must lie in [0, t_end]".into());
            }
        }
    }
    // Model-level checks from the library.
    if errs.is_empty() {
        if let Err(e) = model_check(e, c) {
            errs.push(e.to_string());
        }
    }
    errs
}

fn model_check(e: Experiment, c: &ExperimentConfig) -> quench_core::Result<()> {
    match kind_of(e, c) {
        "lmg" => ModelSpec::Lmg(lmg_params(c.model())).validate(),
        "dicke" => {
            let grid = c
                .grid
                .clone()
                .unwrap_or_else(|| vec![c.model().lambda_ratio.unwrap_or(0.5)]);
            for r in grid {
                ModelSpec::Dicke(dicke_params(c.model(), r)).validate()?;
            }
            Ok(())
        }
        _ => Ok(()),
    }
}

/// Result of one experiment, before it is written to disk.
#[derive(Clone, Debug, Default)]
pub struct Outcome {
    /// `(file name, contents)` of CSV artifacts.
    pub files: Vec<(String, String)>,
    pub fit: Option<LogFit>,
    pub sweep: Option<KappaSweep>,
    /// Experiment-specific figures of merit.
    pub summary: Map<String, Value>,
    pub discarded: usize,
}

impl Outcome {
    fn put(&mut self, key: &str, v: impl Into<Value>) {
        self.summary.insert(key.to_string(), v.into());
    }

    fn hist(&mut self, name: &str, h: &TimeAveragedHistogram) {
        self.files.push((format!("hist_{name}.csv"), h.to_csv()));
    }
}

pub type RunResult<T> = Result<T, Error>;

/// Runs a resolved experiment.
pub fn run(e: Experiment, c: &ExperimentConfig) -> RunResult<Outcome> {
    match e {
        Experiment::Fig1 => fig1(c),
        Experiment::Fig2a => fig2a(c),
        Experiment::Fig2b => fig2b(c),
        Experiment::Fig2c => fig2c(c),
        Experiment::Fig3 => fig3(c),
        Experiment::Fig4 => fig4(c),
        Experiment::AppA => app_a(c),
        Experiment::AppC => app_c(c),
        Experiment::AppD => app_d(c),
        Experiment::AppG => app_g(c),
        Experiment::Custom => custom(c),
    }
}

fn req<T: Clone>(v: &Option<T>, what: &str) -> RunResult<T> {
    v.clone()
        .ok_or_else(|| Error::InvalidInput(format!("missing {what}")))
}

fn scheme_of(c: &ExperimentConfig) -> RunResult<StepScheme<f64>> {
    let name = req(&c.scheme, "scheme")?;
    let kind = StepKind::parse(&name)
        .ok_or_else(|| Error::InvalidInput(format!("unknown scheme '{name}'")))?;
    StepScheme::new(kind, req(&c.dt, "dt")?)
}

fn window(c: &ExperimentConfig) -> RunResult<(f64, f64)> {
    let [lo, hi] = req(&c.fit_window, "fit_window")?;
    Ok((lo, hi))
}

fn lmg_params(m: &ModelConfig) -> LmgParams<f64> {
    LmgParams::new(m.mu.unwrap_or(1.0), m.j.unwrap_or(0.2))
        .with_alpha(m.alpha.unwrap_or(0.0))
        .with_beta(m.beta.unwrap_or(0.0))
        .with_damping(m.eta.unwrap_or(0.0))
        .with_temperature(m.temperature.unwrap_or(0.0))
}

fn dicke_params(m: &ModelConfig, ratio: f64) -> DickeParams<f64> {
    let mut p = DickeParams::new(
        m.omega0.unwrap_or(std::f64::consts::FRAC_1_SQRT_2),
        m.omega.unwrap_or(3f64.sqrt()),
        0.0,
        m.spin_j.unwrap_or(1e6),
    );
    p.lambda = ratio * p.lambda_c();
    p
}

/// Compact label for grid values in file names: `0.5`, `2`, `1000`.
fn label(v: f64) -> String {
    format!("{v}")
}

/// `phi` measured from the stable phase, in `[-pi, pi)`.
fn phase_observable(p: &LmgParams<f64>, bins: usize) -> RunResult<Observable<f64>> {
    let stable = p.stable_phase();
    Observable::new("phi", -PI, PI, bins, move |q: &PhasePoint<f64>| {
        Some((q[0] - stable).wrap_pi())
    })
}

/// Runs `produce` at every grid point (in parallel) and fits its output.
/// The produced data is kept even where the fit fails.
fn sweep_with<A: Send>(
    parameter: &str,
    grid: &[f64],
    produce: impl Fn(f64) -> RunResult<A> + Sync,
    fit: impl Fn(&A) -> RunResult<LogFit> + Sync,
) -> RunResult<(KappaSweep, Vec<Option<A>>)> {
    let extras: Mutex<BTreeMap<usize, A>> = Mutex::new(BTreeMap::new());
    let sweep = kappa_sweep(parameter, grid, |g| {
        let idx = grid.iter().position(|x| *x == g).expect("grid value");
        let a = produce(g)?;
        let result = fit(&a);
        extras.lock().expect("no poisoning").insert(idx, a);
        result
    })?;
    let mut extras = extras.into_inner().expect("no poisoning");
    let collected = (0..grid.len()).map(|i| extras.remove(&i)).collect();
    Ok((sweep, collected))
}

fn theory_ratio(kappa: f64, theory: f64) -> Value {
    if theory != 0.0 && kappa.is_finite() {
        json!(kappa / theory)
    } else {
        Value::Null
    }
}

// --- classical spin model ---------------------------------------------------

fn fig1(c: &ExperimentConfig) -> RunResult<Outcome> {
    let mut out = Outcome::default();
    let params = lmg_params(c.model());
    let (fit, _) = lmg_classical(c, params, &mut out)?;
    out.put("kappa_pi2", fit.kappa * PI * PI);
    out.put("offset", fit.offset);
    out.fit = Some(fit);
    Ok(out)
}

/// Uniform phase line with `n = 0`, evolved under the spin model.
fn lmg_classical(
    c: &ExperimentConfig,
    params: LmgParams<f64>,
    out: &mut Outcome,
) -> RunResult<(LogFit, TimeAveragedHistogram)> {
    let n = req(&c.trajectories, "trajectories")?;
    let ens = build_initial_ensemble(&InitialCondition::UniformPhaseLine, n, c.seed.unwrap_or(0))?;
    let obs = phase_observable(&params, req(&c.bins, "bins")?)?;
    let snapshots = c.snapshot_times.clone().unwrap_or_default();
    let run = Evolution::new(scheme_of(c)?, req(&c.t_end, "t_end")?)
        .burn_in(c.burn_in.unwrap_or(0.0))
        .snapshots(snapshots.clone())
        .run(&ModelSpec::Lmg(params), &ens, &[obs])?;
    let h = &run.histograms[0];
    out.hist("phi", h);
    for (t, snap) in snapshots.iter().zip(&run.snapshots) {
        let mut csv = String::from("phi,n,color_index\n");
        for s in &snap.points {
            let phi0 = ens.points()[s.trajectory][0];
            // Eight colour bands by initial phase.
            let band = (((phi0 + PI) / (2.0 * PI)) * 8.0).floor().clamp(0.0, 7.0) as usize;
            csv.push_str(&format!(
                "{},{},{band}\n",
                fmt17(s.point[0]),
                fmt17(s.point[1])
            ));
        }
        out.files
            .push((format!("snapshots_{}.csv", label(*t)), csv));
    }
    Ok((
        fit_log_divergence(h, window(c)?, params.alpha == 0.0)?,
        h.clone(),
    ))
}

fn fig3(c: &ExperimentConfig) -> RunResult<Outcome> {
    let mut out = Outcome::default();
    let params = lmg_params(c.model());
    let grid = req(&c.grid, "grid")?;
    let t_end = req(&c.t_end, "t_end")?;
    let n = req(&c.trajectories, "trajectories")?;
    let ens = build_initial_ensemble(&InitialCondition::UniformPhaseLine, n, c.seed.unwrap_or(0))?;
    let obs = phase_observable(&params, req(&c.bins, "bins")?)?;
    let checkpoints: Vec<f64> = grid.iter().copied().filter(|&tau| tau < t_end).collect();
    let run = Evolution::new(scheme_of(c)?, t_end)
        .burn_in(c.burn_in.unwrap_or(0.0))
        .checkpoints(checkpoints)
        .run(&ModelSpec::Lmg(params), &ens, &[obs])?;
    let mut by_tau: Vec<(f64, TimeAveragedHistogram)> = run
        .checkpoints
        .iter()
        .map(|(t, h)| (*t, h[0].clone()))
        .collect();
    by_tau.push((t_end, run.histograms[0].clone()));
    let w = window(c)?;
    let (sweep, hists) = sweep_with(
        "tau",
        &grid,
        |tau| {
            by_tau
                .iter()
                .find(|(t, _)| (t - tau).abs() < 1e-9)
                .map(|(_, h)| h.clone())
                .ok_or_else(|| Error::InvalidInput(format!("no histogram for tau = {tau}")))
        },
        |h| fit_log_divergence(h, w, true),
    )?;
    let p0_term = -1.0 / (PI * PI);
    let theory: Vec<f64> = grid
        .iter()
        .map(|&tau| p0_term * dissipative_prefactor(params.eta, tau))
        .collect();
    let ratios: Vec<Value> = sweep
        .kappa
        .iter()
        .zip(&theory)
        .map(|(k, t)| theory_ratio(*k, *t))
        .collect();
    for (tau, h) in grid.iter().zip(&hists) {
        if let Some(h) = h {
            out.hist(&format!("phi_tau{}", label(*tau)), h);
        }
    }
    out.hist("phi", &run.histograms[0]);
    out.fit = fit_log_divergence(&run.histograms[0], w, true).ok();
    out.put("kappa_theory", theory);
    out.put("kappa_over_theory", ratios);
    out.sweep = Some(sweep);
    Ok(out)
}

fn fig4(c: &ExperimentConfig) -> RunResult<Outcome> {
    let mut out = Outcome::default();
    let params = lmg_params(c.model());
    let (fit, h) = lmg_classical(c, params, &mut out)?;
    let reference = BoltzmannReference::new(params.temperature, params.mu, params.j)?;
    // The histogram is measured from the stable phase.
    let stable = params.stable_phase();
    let mut csv = String::from("bin_center,density\n");
    let (mut sup, mut peak) = (0.0f64, 0.0f64);
    for b in 0..h.n_bins() {
        let (lo, hi) = h.bin_edges(b);
        let e = reference.bin_average(lo + stable, hi + stable);
        sup = sup.max((h.density(b) - e).abs());
        peak = peak.max(e);
        csv.push_str(&format!("{},{}\n", fmt17(h.bin_center(b)), fmt17(e)));
    }
    out.files.push(("reference_phi.csv".into(), csv));
    out.put("sup_norm_relative", sup / peak);
    out.put("kappa", fit.kappa);
    out.fit = Some(fit);
    Ok(out)
}

// --- harmonic oscillator ----------------------------------------------------

struct HarmonicRun {
    hist: TimeAveragedHistogram,
}

fn harmonic_run(c: &ExperimentConfig, m: f64, omega0: f64) -> RunResult<HarmonicRun> {
    let mc = c.model();
    let x0 = mc.x0.unwrap_or(1.0);
    let l = mc.line_half_length.unwrap_or(1.5);
    let n = req(&c.trajectories, "trajectories")?;
    let ens = build_initial_ensemble(
        &InitialCondition::DeltaMomentumLine {
            value: 0.0,
            x_lo: -l,
            x_hi: l,
        },
        n,
        c.seed.unwrap_or(0),
    )?;
    // x is recorded inside the momentum strip |p| < x0 in unit-oscillator
    // coordinates: x(t) does not depend on m, and p / (m omega0) is the unit
    // oscillator's momentum at the same phase.
    let scale = m * omega0;
    let obs = Observable::new(
        "x",
        -l,
        l,
        req(&c.bins, "bins")?,
        move |q: &PhasePoint<f64>| (q[1].abs() / scale < x0).then_some(q[0]),
    )?;
    let base = scheme_of(c)?;
    let scheme = StepScheme::new(base.kind, base.dt / omega0)?;
    let run = Evolution::new(scheme, req(&c.t_end, "t_end")? / omega0)
        .burn_in(c.burn_in.unwrap_or(0.0) / omega0)
        .run(&ModelSpec::Harmonic { m, omega0 }, &ens, &[obs])?;
    Ok(HarmonicRun {
        hist: run.histograms[0].clone(),
    })
}

fn app_a(c: &ExperimentConfig) -> RunResult<Outcome> {
    let mut out = Outcome::default();
    let mc = c.model();
    let x0 = mc.x0.unwrap_or(1.0);
    let l = mc.line_half_length.unwrap_or(1.5);
    let p0 = 1.0 / (2.0 * l);
    let unit = harmonic_run(c, 1.0, 1.0)?;
    let h = &unit.hist;
    out.hist("x", h);
    let mut csv = String::from("bin_center,density\n");
    let mut sup = 0.0f64;
    for b in 0..h.n_bins() {
        let (a, z) = h.bin_edges(b);
        let e = if a * z > 0.0 {
            harmonic_marginal_bin_average(a, z, x0, p0)?
        } else {
            f64::NAN
        };
        if a.abs().min(z.abs()) >= 0.01 - 1e-12 && a.abs().max(z.abs()) <= x0 + 1e-12 && a * z > 0.0
        {
            sup = sup.max((h.density(b) / e - 1.0).abs());
        }
        if e.is_finite() {
            csv.push_str(&format!("{},{}\n", fmt17(h.bin_center(b)), fmt17(e)));
        }
    }
    out.files.push(("reference_x.csv".into(), csv));
    let fit = fit_log_divergence(h, window(c)?, true)?;
    let theory = -2.0 * p0 / PI;
    out.put("sup_norm_relative", sup);
    out.put("kappa_over_theory", fit.kappa / theory);
    let (m, omega0) = (mc.m.unwrap_or(1.0), mc.omega0.unwrap_or(1.0));
    let scaled = harmonic_run(c, m, omega0)?;
    out.hist("x_rescaled", &scaled.hist);
    let peak = h.densities().into_iter().fold(0.0, f64::max);
    let diff = h
        .densities()
        .iter()
        .zip(scaled.hist.densities())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    out.put("rescaled_max_difference", diff / peak);
    out.fit = Some(fit);
    Ok(out)
}

// --- Dicke and kicked rotor ---------------------------------------------------

fn dicke_point(c: &ExperimentConfig, ratio: f64) -> RunResult<(TimeAveragedHistogram, usize)> {
    let mc = c.model();
    let p = dicke_params(mc, ratio);
    let x_var = p.j / 4.0;
    let spec = InitialCondition::DickeSqueezedVacuum {
        x_var,
        px_var: 1.0 / p.j,
        omega0: p.omega0,
    };
    let ens = build_initial_ensemble(
        &spec,
        req(&c.trajectories, "trajectories")?,
        c.seed.unwrap_or(0),
    )?;
    // Cavity coordinate in units where the initial marginal peaks at 1/(2 pi).
    let p0 = 1.0 / ((2.0 * PI).sqrt() * x_var.sqrt());
    let scale = 2.0 * PI * p0;
    let obs = Observable::new(
        "u",
        -1.0,
        1.0,
        req(&c.bins, "bins")?,
        move |q: &PhasePoint<f64>| Some(q[0] * scale),
    )?;
    let run = Evolution::new(scheme_of(c)?, req(&c.t_end, "t_end")?)
        .burn_in(c.burn_in.unwrap_or(0.0))
        .divergence_policy(DivergencePolicy::Discard)
        .run(&ModelSpec::Dicke(p), &ens, &[obs])?;
    Ok((run.histograms[0].clone(), run.discarded.len()))
}

fn fig2b(c: &ExperimentConfig) -> RunResult<Outcome> {
    let mut out = Outcome::default();
    let grid = req(&c.grid, "grid")?;
    let w = window(c)?;
    let (sweep, extras) = sweep_with(
        "lambda/lambda_c",
        &grid,
        |r| dicke_point(c, r),
        |(h, _)| fit_log_divergence(h, w, true),
    )?;
    let theory: Vec<f64> = grid
        .iter()
        .map(|&r| if r < 1.0 { -1.0 / (PI * PI) } else { 0.0 })
        .collect();
    let mut discarded = Vec::new();
    for (r, e) in grid.iter().zip(&extras) {
        if let Some((h, d)) = e {
            out.hist(&format!("u_lambda{}", label(*r)), h);
            discarded.push(*d);
            out.discarded += d;
        }
    }
    out.put("kappa_theory", theory.clone());
    out.put(
        "kappa_over_theory",
        sweep
            .kappa
            .iter()
            .zip(&theory)
            .map(|(k, t)| theory_ratio(*k, *t))
            .collect::<Vec<_>>(),
    );
    out.put("discarded", discarded);
    out.sweep = Some(sweep);
    Ok(out)
}

fn rotor_point(c: &ExperimentConfig, k: f64) -> RunResult<TimeAveragedHistogram> {
    let ens = build_initial_ensemble(
        &InitialCondition::UniformMomentumLine,
        req(&c.trajectories, "trajectories")?,
        c.seed.unwrap_or(0),
    )?;
    let obs = Observable::new(
        "p",
        -PI,
        PI,
        req(&c.bins, "bins")?,
        |q: &PhasePoint<f64>| Some(q[1].wrap_pi()),
    )?;
    iterate_map_ensemble(
        &ModelSpec::KickedRotor { k },
        &ens,
        req(&c.iterations, "iterations")?,
        &obs,
    )
}

/// `-(2 P0 / pi) sqrt(1 - K/4)` with `P0 = 1/(2 pi)`, zero past `K = 4`.
pub fn rotor_kappa_theory(k: f64) -> f64 {
    if k >= 4.0 {
        0.0
    } else {
        -(1.0 - k / 4.0).sqrt() / (PI * PI)
    }
}

fn fig2c(c: &ExperimentConfig) -> RunResult<Outcome> {
    let mut out = Outcome::default();
    let grid = req(&c.grid, "grid")?;
    let w = window(c)?;
    let (sweep, hists) = sweep_with(
        "K",
        &grid,
        |k| rotor_point(c, k),
        |h| fit_log_divergence(h, w, true),
    )?;
    let theory: Vec<f64> = grid.iter().map(|&k| rotor_kappa_theory(k)).collect();
    for (k, h) in grid.iter().zip(&hists) {
        if let Some(h) = h {
            out.hist(&format!("p_K{}", label(*k)), h);
        }
    }
    out.put("kappa_theory", theory.clone());
    out.put(
        "kappa_over_theory",
        sweep
            .kappa
            .iter()
            .zip(&theory)
            .map(|(k, t)| theory_ratio(*k, *t))
            .collect::<Vec<_>>(),
    );
    out.sweep = Some(sweep);
    Ok(out)
}

// --- quantum ----------------------------------------------------------------

fn quantum_observable(m: &ModelConfig) -> QuantumObservable {
    match m.observable.as_deref() {
        Some("m_x") => QuantumObservable::Mx,
        _ => QuantumObservable::My,
    }
}

fn quantum_fit_window(c: &ExperimentConfig, s: u32) -> (f64, f64) {
    match c.fit_window {
        Some([lo, hi]) => (lo, hi),
        None => quench_core::stats::quantum_window(s as f64),
    }
}

fn quantum_fit(c: &ExperimentConfig, d: &QuenchDistribution) -> RunResult<LogFit> {
    // P(m_y) = P(-m_y) holds for any real Hamiltonian, so both signs are pooled.
    d.fit_log(quantum_fit_window(c, d.s), true)
}

fn quantum_point(
    c: &ExperimentConfig,
    basis: &ObservableBasis,
    j: f64,
) -> RunResult<QuenchDistribution> {
    let m = c.model();
    quench_distribution_in(
        basis,
        m.mu.unwrap_or(1.0),
        j,
        m.alpha.unwrap_or(0.0),
        m.beta.unwrap_or(0.0),
    )
}

fn fig2a(c: &ExperimentConfig) -> RunResult<Outcome> {
    let mut out = Outcome::default();
    let m = c.model();
    let s = req(&m.spin, "spin")?;
    let grid = req(&c.grid, "grid")?;
    let basis = ObservableBasis::new(s, QuantumObservable::My)?;
    let mu = m.mu.unwrap_or(1.0);
    let (sweep, dists) = sweep_with(
        "J/mu",
        &grid,
        |r| quantum_point(c, &basis, r * mu),
        |d| quantum_fit(c, d),
    )?;
    for (r, d) in grid.iter().zip(&dists) {
        if let Some(d) = d {
            out.files
                .push((format!("prob_m_y_J{}.csv", label(*r)), d.to_csv()));
        }
    }
    let kpi2: Vec<Value> = sweep
        .kappa
        .iter()
        .map(|k| {
            if k.is_finite() {
                json!(k * PI * PI)
            } else {
                Value::Null
            }
        })
        .collect();
    out.put("kappa_pi2", kpi2);
    let at = |g: f64| {
        grid.iter()
            .position(|x| (x - g).abs() < 1e-12)
            .map(|i| sweep.kappa[i])
    };
    if let (Some(a), Some(b)) = (at(0.5), at(1.5)) {
        out.put("kappa_ratio_1.5_over_0.5", b / a);
    }
    if let Some(i) = grid.iter().position(|x| (x - 0.5).abs() < 1e-12) {
        if let Some(d) = &dists[i] {
            out.fit = Some(quantum_fit(c, d)?);
        }
    }
    out.sweep = Some(sweep);
    Ok(out)
}

fn app_c(c: &ExperimentConfig) -> RunResult<Outcome> {
    let mut out = Outcome::default();
    let spins = req(&c.spins, "spins")?;
    let j = c.model().j.unwrap_or(0.5);
    let grid: Vec<f64> = spins.iter().map(|&s| s as f64).collect();
    let (sweep, extras) = sweep_with(
        "S",
        &grid,
        |s| {
            quantum_point(
                c,
                &ObservableBasis::new(s as u32, QuantumObservable::My)?,
                j,
            )
        },
        |d| quantum_fit(c, d),
    )?;
    let mut cutoffs = Vec::new();
    let mut scaled = Vec::new();
    for (s, d) in spins.iter().zip(&extras) {
        let Some(d) = d else { continue };
        out.files.push((format!("prob_m_y_S{s}.csv"), d.to_csv()));
        // Points whose fit failed have no cutoff.
        match quantum_fit(c, d).and_then(|f| d.ir_cutoff(&f)) {
            Ok(cut) => {
                cutoffs.push(json!(cut));
                scaled.push(json!(cut * *s as f64));
            }
            Err(_) => {
                cutoffs.push(Value::Null);
                scaled.push(Value::Null);
            }
        }
    }
    out.put("ir_cutoff", cutoffs);
    out.put("ir_cutoff_times_s", scaled);
    out.put(
        "kappa_pi2",
        sweep.kappa.iter().map(|k| k * PI * PI).collect::<Vec<_>>(),
    );
    out.sweep = Some(sweep);
    Ok(out)
}

fn app_d(c: &ExperimentConfig) -> RunResult<Outcome> {
    let mut out = Outcome::default();
    let m = c.model();
    let s = req(&m.spin, "spin")?;
    let j = m.j.unwrap_or(0.5);
    let basis = ObservableBasis::new(s, QuantumObservable::Mx)?;
    let d = quantum_point(c, &basis, j)?;
    out.files.push(("prob_m_x.csv".into(), d.to_csv()));
    tail_summary(&mut out, &d, j)?;
    Ok(out)
}

fn tail_summary(out: &mut Outcome, d: &QuenchDistribution, j: f64) -> RunResult<()> {
    // The classical minimum of 2 J S_x sits at m_x = -sign(J).
    let pole = if j >= 0.0 { -1.0 } else { 1.0 };
    out.put("stable_pole", pole);
    out.put("tail_exponent", mx_tail_exponent_at(d, pole)?);
    out.put("tail_exponent_at_plus_one", mx_tail_exponent(d)?);
    Ok(())
}

fn app_g(c: &ExperimentConfig) -> RunResult<Outcome> {
    let mut out = Outcome::default();
    let m = c.model();
    let s = req(&m.spin, "spin")?;
    let obs = quantum_observable(m);
    let basis = ObservableBasis::new(s, obs)?;
    let j = m.j.unwrap_or(0.5);
    let d = quantum_point(c, &basis, j)?;
    out.files
        .push((format!("prob_{}.csv", obs.name()), d.to_csv()));
    if obs == QuantumObservable::Mx {
        tail_summary(&mut out, &d, j)?;
        return Ok(out);
    }
    let fit = quantum_fit(c, &d)?;
    out.put("kappa", fit.kappa);
    out.put("kappa_pi2", fit.kappa * PI * PI);
    out.put("divergent", fit.is_divergent());
    out.fit = Some(fit);
    Ok(out)
}

fn custom(c: &ExperimentConfig) -> RunResult<Outcome> {
    match kind_of(Experiment::Custom, c) {
        "harmonic" => app_a(c),
        "quantum" => app_g(c),
        "dicke" => {
            let mut out = Outcome::default();
            let (h, discarded) = dicke_point(c, c.model().lambda_ratio.unwrap_or(0.5))?;
            let fit = fit_log_divergence(&h, window(c)?, true)?;
            out.hist("u", &h);
            out.discarded = discarded;
            out.put("kappa", fit.kappa);
            out.fit = Some(fit);
            Ok(out)
        }
        "kicked_rotor" => {
            let mut out = Outcome::default();
            let h = rotor_point(c, c.model().k.unwrap_or(2.0))?;
            let fit = fit_log_divergence(&h, window(c)?, true)?;
            out.hist("p", &h);
            out.put("kappa", fit.kappa);
            out.fit = Some(fit);
            Ok(out)
        }
        _ => {
            let mut out = Outcome::default();
            let (fit, _) = lmg_classical(c, lmg_params(c.model()), &mut out)?;
            out.put("kappa", fit.kappa);
            out.fit = Some(fit);
            Ok(out)
        }
    }
}
