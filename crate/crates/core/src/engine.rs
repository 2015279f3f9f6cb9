//! The collision event loop.
//!
//! Positions and times are never simulated. With the small block trapped
//! between the wall and the big block, the next event is fully determined by
//! the velocities:
//!
//! * `V < v`: the blocks approach each other, so they collide next;
//! * otherwise, `v < 0`: the small block is heading for the wall;
//! * otherwise (`v >= 0` and `V >= v`) both recede and nothing else happens.
//!
//! Two block-block collisions can never be adjacent (the relative velocity
//! flips sign), and two wall bounces can't either (a bounce leaves `v > 0`),
//! so events strictly alternate.

use std::fmt;
use std::io::{self, Write};

use num_rational::BigRational;
use num_traits::{One, Signed};
use serde::Serialize;

use crate::backend::{
    measure_drift, Backend, BackendChoice, BackendKind, DriftReport, ExactBackend, ExactLimits, ExactScalar,
    FloatBackend, StateRelation,
};
use crate::error::{Error, Result};
use crate::kinematics::VelocityPair;
use crate::ratio::MassRatio;

/// Default cap on the number of events in one run.
pub const DEFAULT_MAX_EVENTS: u64 = 100_000_000;

/// Column header of the trace CSV.
pub const TRACE_HEADER: &str = "index,kind,v,V,abs_v,abs_V,u,energy";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum CollisionKind {
    #[serde(rename = "block-block")]
    BlockBlock,
    #[serde(rename = "block-wall")]
    BlockWall,
}

impl CollisionKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CollisionKind::BlockBlock => "block-block",
            CollisionKind::BlockWall => "block-wall",
        }
    }
}

impl fmt::Display for CollisionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// What happens next from a state, or `None` if the blocks separate for good.
pub fn next_event(rel: StateRelation) -> Option<CollisionKind> {
    use std::cmp::Ordering::*;
    match rel {
        StateRelation { big_vs_small: Less, .. } => Some(CollisionKind::BlockBlock),
        StateRelation { small_sign: Less, .. } => Some(CollisionKind::BlockWall),
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CollisionEvent<S> {
    /// 1-based.
    pub index: u64,
    pub kind: CollisionKind,
    pub post: VelocityPair<S>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Termination {
    /// Both blocks move away from the wall and the big one is at least as
    /// fast as the small one.
    Separating,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    pub record_trace: bool,
    pub max_events: u64,
    /// Initial speed `c > 0` of the big block; it starts at `V = -c`.
    pub start_speed: BigRational,
    pub exact_limits: ExactLimits,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            record_trace: false,
            max_events: DEFAULT_MAX_EVENTS,
            start_speed: BigRational::one(),
            exact_limits: ExactLimits::default(),
        }
    }
}

impl RunOptions {
    pub fn with_trace(mut self) -> Self {
        self.record_trace = true;
        self
    }
}

#[derive(Debug, Clone)]
pub struct SimulationResult<B: Backend> {
    pub backend: B,
    pub count: u64,
    pub initial_state: VelocityPair<B::Scalar>,
    pub final_state: VelocityPair<B::Scalar>,
    pub termination: Termination,
    pub drift: DriftReport,
    pub trace: Option<Vec<CollisionEvent<B::Scalar>>>,
}

/// Runs the event loop on an already constructed backend.
pub fn simulate<B: Backend>(backend: B, options: &RunOptions) -> Result<SimulationResult<B>> {
    let mut trace = options.record_trace.then(Vec::new);
    let mut result = simulate_with(backend, options, |index, kind, post| {
        if let Some(events) = trace.as_mut() {
            events.push(CollisionEvent {
                index,
                kind,
                post: post.clone(),
            });
        }
    })?;
    result.trace = trace;
    Ok(result)
}

/// Like [`simulate`], but hands every event to `observe` as it happens
/// instead of collecting a trace. `options.record_trace` is ignored.
pub fn simulate_with<B, F>(backend: B, options: &RunOptions, mut observe: F) -> Result<SimulationResult<B>>
where
    B: Backend,
    F: FnMut(u64, CollisionKind, &VelocityPair<B::Scalar>),
{
    let initial = backend.initial_state();
    let mut state = initial.clone();
    let mut drift = measure_drift(&backend, &initial, &initial);
    let mut count = 0u64;

    while let Some(kind) = next_event(backend.relation(&state)) {
        if count >= options.max_events {
            return Err(Error::Runaway { reached: count });
        }
        count += 1;
        match kind {
            CollisionKind::BlockBlock => {
                let before = state.clone();
                backend.collide(&mut state).map_err(|source| Error::Backend {
                    index: count,
                    source: Box::new(source),
                })?;
                drift.momentum_rel_drift = drift.momentum_rel_drift.max(backend.momentum_defect(&before, &state));
            }
            CollisionKind::BlockWall => {
                backend.reflect(&mut state);
                drift.observe_momentum(backend.momentum_f64(&state));
            }
        }
        observe(count, kind, &state);
    }

    drift.energy_rel_drift = backend.energy_drift(&initial, &state);
    Ok(SimulationResult {
        backend,
        count,
        initial_state: initial,
        final_state: state,
        termination: Termination::Separating,
        drift,
        trace: None,
    })
}

/// One row of the trace table. Row 0 is the initial state and has no kind.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceRow {
    pub index: u64,
    pub kind: Option<CollisionKind>,
    pub v: String,
    #[serde(rename = "V")]
    pub big_v: String,
    pub abs_v: String,
    #[serde(rename = "abs_V")]
    pub abs_big_v: String,
    pub u: f64,
    pub energy: String,
    /// `(|v|, |V|)` in `f64`; not part of the CSV.
    #[serde(skip)]
    pub speeds: VelocityPair<f64>,
}

impl TraceRow {
    pub fn kind_label(&self) -> &'static str {
        self.kind.map_or("initial", CollisionKind::as_str)
    }

    pub fn to_csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            self.index,
            self.kind_label(),
            self.v,
            self.big_v,
            self.abs_v,
            self.abs_big_v,
            self.u,
            self.energy
        )
    }
}

impl<B: Backend> SimulationResult<B> {
    pub fn ratio(&self) -> &MassRatio {
        self.backend.ratio()
    }

    fn row(&self, index: u64, kind: Option<CollisionKind>, s: &VelocityPair<B::Scalar>) -> TraceRow {
        trace_row(&self.backend, index, kind, s)
    }

    /// Trace as table rows: the initial state, then one row per event.
    pub fn trace_rows(&self) -> Result<Vec<TraceRow>> {
        let events = self.trace.as_ref().ok_or(Error::TraceAbsent)?;
        let mut rows = Vec::with_capacity(events.len() + 1);
        rows.push(self.row(0, None, &self.initial_state));
        rows.extend(events.iter().map(|e| self.row(e.index, Some(e.kind), &e.post)));
        Ok(rows)
    }

    /// Writes the trace as CSV, streaming row by row.
    pub fn write_trace_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        let events = self
            .trace
            .as_ref()
            .ok_or_else(|| io::Error::other(Error::TraceAbsent))?;
        writeln!(out, "{TRACE_HEADER}")?;
        writeln!(out, "{}", self.row(0, None, &self.initial_state).to_csv_line())?;
        for e in events {
            writeln!(out, "{}", self.row(e.index, Some(e.kind), &e.post).to_csv_line())?;
        }
        out.flush()
    }

    /// `(|v|, |V|)` in `f64` for every event.
    pub fn speed_series(&self) -> Option<Vec<(f64, f64)>> {
        let b = &self.backend;
        self.trace.as_ref().map(|events| {
            events
                .iter()
                .map(|e| (b.to_f64(&e.post.small).abs(), b.to_f64(&e.post.big).abs()))
                .collect()
        })
    }

    pub fn final_state_f64(&self) -> VelocityPair<f64> {
        VelocityPair::new(
            self.backend.to_f64(&self.final_state.small),
            self.backend.to_f64(&self.final_state.big),
        )
    }
}

/// Renders one trace row for a state of a run on `backend`.
pub fn trace_row<B: Backend>(
    backend: &B,
    index: u64,
    kind: Option<CollisionKind>,
    s: &VelocityPair<B::Scalar>,
) -> TraceRow {
    TraceRow {
        index,
        kind,
        v: backend.render(&s.small),
        big_v: backend.render(&s.big),
        abs_v: backend.render(&backend.abs(&s.small)),
        abs_big_v: backend.render(&backend.abs(&s.big)),
        u: backend.to_f64(&s.small) * backend.ratio().to_f64().sqrt(),
        energy: backend.render_energy(s),
        speeds: VelocityPair::new(backend.to_f64(&s.small).abs(), backend.to_f64(&s.big).abs()),
    }
}

/// Result of a run on either backend.
#[derive(Debug, Clone)]
#[allow(clippy::large_enum_variant)]
pub enum Outcome {
    Exact(SimulationResult<ExactBackend>),
    Float(SimulationResult<FloatBackend>),
}

macro_rules! dispatch {
    ($self:expr, $r:ident => $body:expr) => {
        match $self {
            Outcome::Exact($r) => $body,
            Outcome::Float($r) => $body,
        }
    };
}

impl Outcome {
    pub fn count(&self) -> u64 {
        dispatch!(self, r => r.count)
    }

    pub fn backend_kind(&self) -> BackendKind {
        dispatch!(self, r => r.backend.kind())
    }

    pub fn ratio(&self) -> MassRatio {
        dispatch!(self, r => *r.ratio())
    }

    pub fn drift(&self) -> DriftReport {
        dispatch!(self, r => r.drift)
    }

    pub fn termination(&self) -> Termination {
        dispatch!(self, r => r.termination)
    }

    pub fn final_state_f64(&self) -> VelocityPair<f64> {
        dispatch!(self, r => r.final_state_f64())
    }

    /// Final velocities rendered exactly (`p/q`) or as shortest decimals.
    pub fn final_state_rendered(&self) -> VelocityPair<String> {
        dispatch!(self, r => VelocityPair::new(
            r.backend.render(&r.final_state.small),
            r.backend.render(&r.final_state.big),
        ))
    }

    pub fn trace_len(&self) -> Option<usize> {
        dispatch!(self, r => r.trace.as_ref().map(Vec::len))
    }

    pub fn trace_rows(&self) -> Result<Vec<TraceRow>> {
        dispatch!(self, r => r.trace_rows())
    }

    pub fn write_trace_csv<W: Write>(&self, out: W) -> io::Result<()> {
        dispatch!(self, r => r.write_trace_csv(out))
    }

    pub fn speed_series(&self) -> Option<Vec<(f64, f64)>> {
        dispatch!(self, r => r.speed_series())
    }

    /// Kinds of the recorded events, in order.
    pub fn event_kinds(&self) -> Option<Vec<CollisionKind>> {
        dispatch!(self, r => r.trace.as_ref().map(|t| t.iter().map(|e| e.kind).collect()))
    }

    /// Decimal digit count of the larger final numerator (exact runs only).
    pub fn final_numerator_digits(&self) -> Option<u64> {
        match self {
            Outcome::Exact(r) => Some(final_digits(&r.final_state)),
            Outcome::Float(_) => None,
        }
    }
}

fn final_digits(state: &VelocityPair<ExactScalar>) -> u64 {
    state.small.decimal_digits().max(state.big.decimal_digits())
}

fn start_velocity(options: &RunOptions) -> Result<BigRational> {
    if !options.start_speed.is_positive() {
        return Err(Error::Parse {
            input: options.start_speed.to_string(),
            reason: "initial speed must be positive".into(),
        });
    }
    Ok(-options.start_speed.clone())
}

/// Builds the requested backend and runs the event loop.
pub fn run(ratio: MassRatio, backend: BackendChoice, options: &RunOptions) -> Result<Outcome> {
    let start = start_velocity(options)?;
    match backend.resolve(&ratio) {
        BackendKind::Exact => {
            let b = ExactBackend::new(ratio, &start, options.exact_limits)?;
            simulate(b, options).map(Outcome::Exact)
        }
        BackendKind::Float64 => {
            let b = FloatBackend::new(ratio, &start)?;
            simulate(b, options).map(Outcome::Float)
        }
    }
}

/// Runs without storing a trace, passing each rendered trace row (initial
/// state first) to `sink` as the run progresses.
pub fn run_streaming<F: FnMut(TraceRow)>(
    ratio: MassRatio,
    backend: BackendChoice,
    options: &RunOptions,
    mut sink: F,
) -> Result<Outcome> {
    fn go<B: Backend + Clone, F: FnMut(TraceRow)>(
        b: B,
        options: &RunOptions,
        sink: &mut F,
    ) -> Result<SimulationResult<B>> {
        let renderer = b.clone();
        sink(trace_row(&renderer, 0, None, &renderer.initial_state()));
        simulate_with(b, options, |index, kind, post| {
            sink(trace_row(&renderer, index, Some(kind), post))
        })
    }
    let start = start_velocity(options)?;
    match backend.resolve(&ratio) {
        BackendKind::Exact => {
            let b = ExactBackend::new(ratio, &start, options.exact_limits)?;
            go(b, options, &mut sink).map(Outcome::Exact)
        }
        BackendKind::Float64 => {
            let b = FloatBackend::new(ratio, &start)?;
            go(b, options, &mut sink).map(Outcome::Float)
        }
    }
}

/// Collision count with default options.
pub fn count_collisions(ratio: MassRatio, backend: BackendChoice) -> Result<u64> {
    run(ratio, backend, &RunOptions::default()).map(|o| o.count())
}
