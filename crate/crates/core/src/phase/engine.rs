use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::models::ModelSpec;
use crate::scalar::Real;

use super::{
    Ensemble, PhasePoint, StepKind, StepScheme, StreamDomain, TimeAveragedHistogram, TrajectoryRng,
    MAX_DIM,
};

/// Coordinates above this magnitude abort the trajectory.
const DIVERGENCE_BOUND: f64 = 1e6;
/// Trajectories per work unit. Fixed so that the reduction order does not
/// depend on the number of worker threads.
const CHUNK: usize = 64;
const IMPLICIT_MAX_ITER: usize = 60;

/// Advances `point` by one step of `scheme` under `model`.
///
/// `noise` is a standard normal draw, used only by Euler-Maruyama on models
/// with a noise channel; `None` is treated as a zero draw.
pub fn step<T: Real>(
    model: &ModelSpec<T>,
    point: &PhasePoint<T>,
    scheme: &StepScheme<T>,
    noise: Option<T>,
) -> Result<PhasePoint<T>> {
    if point.dim() != model.dim() {
        return Err(Error::invalid(format!(
            "point has dimension {}, model {} needs {}",
            point.dim(),
            model.name(),
            model.dim()
        )));
    }
    if model.is_map() != (scheme.kind == StepKind::DiscreteMap) {
        return Err(Error::invalid(format!(
            "scheme {} cannot drive model {}",
            scheme.kind.name(),
            model.name()
        )));
    }
    let dt = scheme.dt;
    let dim = point.dim();
    let mut next = match scheme.kind {
        StepKind::DiscreteMap => model.map_step(point),
        StepKind::Euler | StepKind::EulerMaruyama => {
            let f = model.rhs(point)?;
            let mut c = *point.raw();
            for i in 0..dim {
                c[i] = c[i] + dt * f[i];
            }
            if scheme.kind == StepKind::EulerMaruyama {
                if let Some((idx, amp)) = model.noise_channel() {
                    let xi = noise.unwrap_or_else(T::zero);
                    c[idx] = c[idx] + amp * dt.sqrt() * xi;
                }
            }
            PhasePoint::from_raw(c, dim, point.t + dt)
        }
        StepKind::Rk4 => rk4(model, point, dt)?,
        StepKind::SymplecticLeapfrog => leapfrog(model, point, dt)?,
    };
    if scheme.kind == StepKind::DiscreteMap {
        next.t = point.t + T::one();
    }
    model.constrain(&mut next, dt)?;
    if !next.is_finite() || next.max_abs() > T::lit(DIVERGENCE_BOUND) {
        return Err(Error::StepDiverged {
            trajectory: None,
            time: next.t.to_f64_lossy(),
        });
    }
    Ok(next)
}

fn offset<T: Real>(base: &[T; MAX_DIM], k: &[T; MAX_DIM], h: T, dim: usize) -> [T; MAX_DIM] {
    let mut c = *base;
    for i in 0..dim {
        c[i] = c[i] + h * k[i];
    }
    c
}

fn rk4<T: Real>(model: &ModelSpec<T>, p: &PhasePoint<T>, dt: T) -> Result<PhasePoint<T>> {
    let dim = p.dim();
    let half = dt * T::lit(0.5);
    let x = p.raw();
    let at = |c: [T; MAX_DIM], t: T| PhasePoint::from_raw(c, dim, t);
    let k1 = model.rhs(p)?;
    let k2 = model.rhs(&at(offset(x, &k1, half, dim), p.t + half))?;
    let k3 = model.rhs(&at(offset(x, &k2, half, dim), p.t + half))?;
    let k4 = model.rhs(&at(offset(x, &k3, dt, dim), p.t + dt))?;
    let mut c = *x;
    let sixth = dt / T::lit(6.0);
    let two = T::lit(2.0);
    for i in 0..dim {
        c[i] = c[i] + sixth * (k1[i] + two * k2[i] + two * k3[i] + k4[i]);
    }
    Ok(at(c, p.t + dt))
}

/// Generalized Stormer-Verlet for `H(q, p)`:
///
/// ```text
/// p½ = p  + h/2 · F_p(q,  p½)
/// q' = q  + h/2 · (F_q(q, p½) + F_q(q', p½))
/// p' = p½ + h/2 · F_p(q', p½)
/// ```
///
/// with `(F_q, F_p)` the vector field. The two implicit stages are solved by
/// fixed-point iteration, which terminates after one pass for separable
/// Hamiltonians.
fn leapfrog<T: Real>(model: &ModelSpec<T>, p: &PhasePoint<T>, dt: T) -> Result<PhasePoint<T>> {
    let pairs = model.canonical_pairs().ok_or_else(|| {
        Error::invalid(format!(
            "symplectic_leapfrog needs a conservative model, got {}",
            model.name()
        ))
    })?;
    let dim = p.dim();
    let h = dt * T::lit(0.5);
    let tol = T::epsilon() * T::lit(4.0);
    let x0 = *p.raw();
    let eval = |c: [T; MAX_DIM]| model.rhs(&PhasePoint::from_raw(c, dim, p.t));

    let mut half = x0;
    let mut converged = false;
    for _ in 0..IMPLICIT_MAX_ITER {
        let f = eval(half)?;
        let mut change = T::zero();
        for &(_, pi) in pairs {
            let v = x0[pi] + h * f[pi];
            change = change.max((v - half[pi]).abs() / (T::one() + v.abs()));
            half[pi] = v;
        }
        if change <= tol {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::StepDiverged {
            trajectory: None,
            time: (p.t + dt).to_f64_lossy(),
        });
    }

    let f_start = eval(half)?;
    let mut end = half;
    converged = false;
    for _ in 0..IMPLICIT_MAX_ITER {
        let f = eval(end)?;
        let mut change = T::zero();
        for &(qi, _) in pairs {
            let v = x0[qi] + h * (f_start[qi] + f[qi]);
            change = change.max((v - end[qi]).abs() / (T::one() + v.abs()));
            end[qi] = v;
        }
        if change <= tol {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::StepDiverged {
            trajectory: None,
            time: (p.t + dt).to_f64_lossy(),
        });
    }

    let f_end = eval(end)?;
    for &(_, pi) in pairs {
        end[pi] = half[pi] + h * f_end[pi];
    }
    Ok(PhasePoint::from_raw(end, dim, p.t + dt))
}

type Projection<T> = dyn Fn(&PhasePoint<T>) -> Option<T> + Send + Sync;

/// A named projection of phase space onto the real line, with its binning.
///
/// The projection may return `None` for samples that should count towards
/// the normalization but not land in any bin (for example a marginal gated
/// on another coordinate).
#[derive(Clone)]
pub struct Observable<T> {
    pub name: String,
    pub lo: f64,
    pub hi: f64,
    pub bins: usize,
    f: Arc<Projection<T>>,
}

impl<T> fmt::Debug for Observable<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Observable")
            .field("name", &self.name)
            .field("lo", &self.lo)
            .field("hi", &self.hi)
            .field("bins", &self.bins)
            .finish()
    }
}

impl<T: Real> Observable<T> {
    pub fn new(
        name: impl Into<String>,
        lo: f64,
        hi: f64,
        bins: usize,
        f: impl Fn(&PhasePoint<T>) -> Option<T> + Send + Sync + 'static,
    ) -> Result<Self> {
        let obs = Self {
            name: name.into(),
            lo,
            hi,
            bins,
            f: Arc::new(f),
        };
        obs.histogram()?;
        Ok(obs)
    }

    /// Plain coordinate `idx`.
    pub fn coordinate(
        name: impl Into<String>,
        idx: usize,
        lo: f64,
        hi: f64,
        bins: usize,
    ) -> Result<Self> {
        Self::new(name, lo, hi, bins, move |p: &PhasePoint<T>| {
            p.coords().get(idx).copied()
        })
    }

    #[inline]
    pub fn eval(&self, p: &PhasePoint<T>) -> Option<T> {
        (self.f)(p)
    }

    pub fn histogram(&self) -> Result<TimeAveragedHistogram> {
        TimeAveragedHistogram::new(self.lo, self.hi, self.bins)
    }
}

/// What to do when a trajectory diverges or hits a coordinate singularity.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum DivergencePolicy {
    /// Fail the whole run with the trajectory's error.
    #[default]
    Abort,
    /// Drop every contribution of that trajectory and report its id.
    Discard,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SnapshotPoint<T> {
    pub trajectory: usize,
    pub point: PhasePoint<T>,
}

/// Ensemble state at one requested time, ordered by trajectory index.
#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot<T> {
    pub t: T,
    pub points: Vec<SnapshotPoint<T>>,
}

#[derive(Clone, Debug)]
pub struct EnsembleRun<T> {
    /// One histogram per observable over `(burn_in, t_end]`.
    pub histograms: Vec<TimeAveragedHistogram>,
    /// For each checkpoint time `tau`, histograms over `(burn_in, tau]`.
    pub checkpoints: Vec<(T, Vec<TimeAveragedHistogram>)>,
    pub snapshots: Vec<Snapshot<T>>,
    /// Trajectories dropped under [`DivergencePolicy::Discard`].
    pub discarded: Vec<usize>,
    pub steps: usize,
}

/// Run description for [`Evolution::run`].
#[derive(Clone, Debug)]
pub struct Evolution<T> {
    scheme: StepScheme<T>,
    t_end: T,
    burn_in: T,
    checkpoints: Vec<T>,
    snapshots: Vec<T>,
    policy: DivergencePolicy,
}

struct Plan {
    steps: usize,
    burn_steps: usize,
    /// Step index closing each checkpoint segment.
    segment_ends: Vec<usize>,
    snapshot_steps: Vec<usize>,
}

struct ChunkResult<T> {
    /// `segments[s][o]`
    segments: Vec<Vec<TimeAveragedHistogram>>,
    snapshots: Vec<Vec<SnapshotPoint<T>>>,
    discarded: Vec<usize>,
}

impl<T: Real> Evolution<T> {
    pub fn new(scheme: StepScheme<T>, t_end: T) -> Self {
        Self {
            scheme,
            t_end,
            burn_in: T::zero(),
            checkpoints: Vec::new(),
            snapshots: Vec::new(),
            policy: DivergencePolicy::Abort,
        }
    }

    pub fn burn_in(mut self, burn_in: T) -> Self {
        self.burn_in = burn_in;
        self
    }

    /// Intermediate averaging horizons; each must lie in `(burn_in, t_end)`.
    pub fn checkpoints(mut self, times: Vec<T>) -> Self {
        self.checkpoints = times;
        self
    }

    pub fn snapshots(mut self, times: Vec<T>) -> Self {
        self.snapshots = times;
        self
    }

    pub fn divergence_policy(mut self, policy: DivergencePolicy) -> Self {
        self.policy = policy;
        self
    }

    fn steps_to(&self, t: T, t0: T) -> usize {
        let n = ((t - t0) / self.scheme.increment()).round();
        n.to_usize().unwrap_or(0)
    }

    fn plan(&self, t0: T) -> Result<Plan> {
        self.scheme.validate()?;
        if !(self.burn_in >= T::zero() && self.t_end > self.burn_in) {
            return Err(Error::invalid("need t_end > burn_in >= 0"));
        }
        let steps = self.steps_to(self.t_end, t0);
        if steps == 0 {
            return Err(Error::invalid("time window shorter than one step"));
        }
        let burn_steps = if self.burn_in > t0 {
            self.steps_to(self.burn_in, t0)
        } else {
            0
        };
        let mut segment_ends = Vec::new();
        for &c in &self.checkpoints {
            if !(c > self.burn_in && c < self.t_end) {
                return Err(Error::invalid(
                    "checkpoints must lie inside (burn_in, t_end)",
                ));
            }
            let k = self.steps_to(c, t0);
            if segment_ends.last().is_some_and(|&last| k <= last) {
                return Err(Error::invalid("checkpoints must be strictly ascending"));
            }
            segment_ends.push(k);
        }
        segment_ends.push(steps);
        let mut snapshot_steps = Vec::new();
        for &s in &self.snapshots {
            if !(s >= t0 && s <= self.t_end) {
                return Err(Error::invalid("snapshot times must lie inside [t0, t_end]"));
            }
            snapshot_steps.push(self.steps_to(s, t0));
        }
        Ok(Plan {
            steps,
            burn_steps,
            segment_ends,
            snapshot_steps,
        })
    }

    pub fn run(
        &self,
        model: &ModelSpec<T>,
        ens: &Ensemble<T>,
        observables: &[Observable<T>],
    ) -> Result<EnsembleRun<T>> {
        model.validate()?;
        if ens.is_empty() {
            return Err(Error::invalid("empty ensemble"));
        }
        if ens.dim() != model.dim() {
            return Err(Error::invalid(format!(
                "ensemble dimension {} does not match model {}",
                ens.dim(),
                model.name()
            )));
        }
        if observables.is_empty() {
            return Err(Error::invalid("no observables requested"));
        }
        let t0 = ens.points()[0].t;
        let plan = self.plan(t0)?;
        let templates: Vec<TimeAveragedHistogram> = observables
            .iter()
            .map(|o| o.histogram())
            .collect::<Result<_>>()?;
        let increments = ens.sample_increments();
        let stochastic = self.scheme.is_stochastic() && model.noise_channel().is_some();

        let chunk_results: Vec<Result<ChunkResult<T>>> = ens
            .points()
            .par_chunks(CHUNK)
            .enumerate()
            .map(|(c, chunk)| {
                let base = c * CHUNK;
                let mut acc = ChunkResult {
                    segments: vec![templates.clone(); plan.segment_ends.len()],
                    snapshots: vec![Vec::new(); plan.snapshot_steps.len()],
                    discarded: Vec::new(),
                };
                let mut scratch = acc.segments.clone();
                let mut snaps: Vec<Option<PhasePoint<T>>> = vec![None; plan.snapshot_steps.len()];
                for (j, start) in chunk.iter().enumerate() {
                    let id = base + j;
                    scratch.iter_mut().flatten().for_each(|h| h.clear());
                    snaps.iter_mut().for_each(|s| *s = None);
                    let rng = stochastic.then(|| {
                        TrajectoryRng::new(ens.seed(), ens.stream_ids()[id], StreamDomain::Dynamics)
                    });
                    let outcome = self.trajectory(
                        model,
                        *start,
                        t0,
                        &plan,
                        observables,
                        increments[id],
                        rng,
                        &mut scratch,
                        &mut snaps,
                    );
                    match outcome {
                        Ok(()) => {
                            for (a, s) in acc
                                .segments
                                .iter_mut()
                                .flatten()
                                .zip(scratch.iter().flatten())
                            {
                                a.merge(s)?;
                            }
                            for (a, s) in acc.snapshots.iter_mut().zip(&snaps) {
                                if let Some(point) = s {
                                    a.push(SnapshotPoint {
                                        trajectory: id,
                                        point: *point,
                                    });
                                }
                            }
                        }
                        Err(e) => match (self.policy, &e) {
                            (
                                DivergencePolicy::Discard,
                                Error::StepDiverged { .. } | Error::SingularCoordinate { .. },
                            ) => acc.discarded.push(id),
                            _ => return Err(e.with_trajectory(id)),
                        },
                    }
                }
                Ok(acc)
            })
            .collect();

        let mut segments = vec![templates.clone(); plan.segment_ends.len()];
        let mut snapshot_points: Vec<Vec<SnapshotPoint<T>>> =
            vec![Vec::new(); plan.snapshot_steps.len()];
        let mut discarded = Vec::new();
        for r in chunk_results {
            let r = r?;
            for (a, s) in segments
                .iter_mut()
                .flatten()
                .zip(r.segments.iter().flatten())
            {
                a.merge(s)?;
            }
            for (a, s) in snapshot_points.iter_mut().zip(r.snapshots) {
                a.extend(s);
            }
            discarded.extend(r.discarded);
        }
        if discarded.len() == ens.len() {
            return Err(Error::StepDiverged {
                trajectory: None,
                time: self.t_end.to_f64_lossy(),
            });
        }

        let mut cumulative = templates;
        let mut checkpoints = Vec::with_capacity(self.checkpoints.len());
        for (s, seg) in segments.iter().enumerate() {
            for (a, h) in cumulative.iter_mut().zip(seg) {
                a.merge(h)?;
            }
            if s < self.checkpoints.len() {
                checkpoints.push((self.checkpoints[s], cumulative.clone()));
            }
        }
        let snapshots = self
            .snapshots
            .iter()
            .zip(snapshot_points)
            .map(|(&t, points)| Snapshot { t, points })
            .collect();
        Ok(EnsembleRun {
            histograms: cumulative,
            checkpoints,
            snapshots,
            discarded,
            steps: plan.steps,
        })
    }

    #[allow(clippy::too_many_arguments)]
    fn trajectory(
        &self,
        model: &ModelSpec<T>,
        start: PhasePoint<T>,
        t0: T,
        plan: &Plan,
        observables: &[Observable<T>],
        weight: f64,
        mut rng: Option<TrajectoryRng>,
        scratch: &mut [Vec<TimeAveragedHistogram>],
        snaps: &mut [Option<PhasePoint<T>>],
    ) -> Result<()> {
        let inc = self.scheme.increment();
        let mut p = start;
        let mut segment = 0;
        for (s, &k) in plan.snapshot_steps.iter().enumerate() {
            if k == 0 {
                snaps[s] = Some(p);
            }
        }
        for k in 1..=plan.steps {
            let noise = rng.as_mut().map(|r| r.standard_normal::<T>());
            p = step(model, &p, &self.scheme, noise)?;
            // Re-anchor the clock so long runs do not accumulate rounding.
            p.t = t0 + inc * T::from_usize_lossy(k);
            if k > plan.burn_steps {
                while k > plan.segment_ends[segment] {
                    segment += 1;
                }
                let t = p.t.to_f64_lossy();
                for (h, o) in scratch[segment].iter_mut().zip(observables) {
                    let v = o.eval(&p).map_or(f64::NAN, |v| v.to_f64_lossy());
                    h.record(v, weight);
                    h.note_time(t);
                }
            }
            for (s, &ks) in plan.snapshot_steps.iter().enumerate() {
                if ks == k {
                    snaps[s] = Some(p);
                }
            }
        }
        Ok(())
    }
}

/// Time-averaged histograms over `(burn_in, t_end]` for every observable.
pub fn evolve_ensemble<T: Real>(
    model: &ModelSpec<T>,
    ens: &Ensemble<T>,
    scheme: StepScheme<T>,
    t_end: T,
    observables: &[Observable<T>],
    burn_in: T,
) -> Result<Vec<TimeAveragedHistogram>> {
    Ok(Evolution::new(scheme, t_end)
        .burn_in(burn_in)
        .run(model, ens, observables)?
        .histograms)
}

/// Histogram of `observable` over every iterate `1..=n_steps` of a discrete map.
pub fn iterate_map_ensemble<T: Real>(
    model: &ModelSpec<T>,
    ens: &Ensemble<T>,
    n_steps: usize,
    observable: &Observable<T>,
) -> Result<TimeAveragedHistogram> {
    if !model.is_map() {
        return Err(Error::invalid(format!(
            "{} is not a discrete map",
            model.name()
        )));
    }
    if n_steps == 0 {
        return Err(Error::invalid("n_steps must be at least 1"));
    }
    let t0 = ens.points().first().map_or(T::zero(), |p| p.t);
    let evo = Evolution::new(
        StepScheme::discrete_map(),
        t0 + T::from_usize_lossy(n_steps),
    )
    .burn_in(t0.max(T::zero()));
    let mut run = evo.run(model, ens, std::slice::from_ref(observable))?;
    Ok(run.histograms.remove(0))
}
