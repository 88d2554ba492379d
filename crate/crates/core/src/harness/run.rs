//! Run orchestration: step selection, sampling, snapshots and drift summaries.

use std::fmt;

use super::config::RunConfig;
use super::output::RunWriter;
use super::problems::initial_state;
use crate::diagnostics::{modified_energy_from_state, relative_drift, DiagnosticsRecord};
use crate::error::{Error, Result};
use crate::integrators::{cfl_dt, step, Scheme, SolveStats, SystemState};

/// Times closer than this are treated as equal when merging breakpoints.
const TIME_EPS: f64 = 1e-9;
/// Halvings attempted per interval when `retry_halved_dt` is set.
const MAX_RETRIES: usize = 4;

/// Advances a state through a sequence of target times.
///
/// Each call to [`advance_to`](Self::advance_to) divides the remaining
/// interval into equal steps no longer than the CFL step. The explicit
/// scheme recomputes its step from the current field maximum; implicit
/// schemes keep the step fixed from the initial field.
pub struct Simulation<'a> {
    config: &'a RunConfig,
    state: SystemState,
    fixed_dt: Option<f64>,
    last_dt: f64,
    stats: SolveStats,
    steps: usize,
}

impl<'a> Simulation<'a> {
    pub fn new(config: &'a RunConfig) -> Result<Self> {
        config.validate()?;
        Self::from_state(config, initial_state(config)?)
    }

    pub fn from_state(config: &'a RunConfig, state: SystemState) -> Result<Self> {
        let raw = Self::cfl_step(config, &state);
        if !(raw.is_finite() && raw > 0.0) {
            return Err(Error::config(format!("non-positive time step {raw}")));
        }
        Ok(Self {
            config,
            fixed_dt: config.scheme.scheme.is_implicit().then_some(raw),
            last_dt: raw,
            state,
            stats: SolveStats::default(),
            steps: 0,
        })
    }

    fn cfl_step(config: &RunConfig, state: &SystemState) -> f64 {
        cfl_dt(&state.f.disc().mesh, state.e.max_abs_nodal(), config.scheme.cfl)
    }

    pub fn state(&self) -> &SystemState {
        &self.state
    }

    pub fn into_state(self) -> SystemState {
        self.state
    }

    pub fn stats(&self) -> SolveStats {
        self.stats
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Step size used most recently (or planned, before the first step).
    pub fn last_dt(&self) -> f64 {
        self.last_dt
    }

    /// Step size the next interval would be divided by.
    pub fn raw_dt(&self) -> f64 {
        self.fixed_dt
            .unwrap_or_else(|| Self::cfl_step(self.config, &self.state))
    }

    /// Diagnostics of the current state.
    pub fn sample(&self) -> Result<DiagnosticsRecord> {
        let s = &self.state;
        let modified = (self.config.scheme.scheme == Scheme::S3)
            .then(|| modified_energy_from_state(&s.f, &s.e, self.last_dt));
        DiagnosticsRecord::sample(s.t, &s.f, &s.e, self.config.problem.wavenumber, modified)
    }

    pub fn advance_to(&mut self, t_target: f64) -> Result<()> {
        let span = t_target - self.state.t;
        if span <= TIME_EPS {
            return Ok(());
        }
        let raw = self.raw_dt();
        let mut nsteps = ((span / raw) - 1e-9).ceil().max(1.0) as usize;
        let retries = if self.config.retry_halved_dt { MAX_RETRIES } else { 0 };
        let mut attempt = 0;
        loop {
            match self.try_interval(t_target, span, nsteps, raw) {
                Ok((state, stats, dt)) => {
                    self.state = state;
                    self.stats += stats;
                    self.steps += nsteps;
                    self.last_dt = dt;
                    return Ok(());
                }
                Err(e) if attempt < retries && e.is_solver_failure() => {
                    attempt += 1;
                    nsteps *= 2;
                }
                Err(e) => return Err(e),
            }
        }
    }

    fn try_interval(
        &self,
        t_target: f64,
        span: f64,
        nsteps: usize,
        raw: f64,
    ) -> Result<(SystemState, SolveStats, f64)> {
        let dt = span / nsteps as f64;
        let mut state = self.state.clone();
        let mut stats = SolveStats::default();
        for _ in 0..nsteps {
            let t0 = state.t;
            let (next, s) = step(&state, dt, &self.config.scheme).map_err(|e| Error::StepFailed {
                t: t0,
                cfl: self.config.scheme.cfl * dt / raw,
                source: Box::new(e),
            })?;
            state = next;
            stats += s;
        }
        state.t = t_target;
        Ok((state, stats, dt))
    }
}

/// Sorted sample and snapshot times in `[0, t_final]`.
fn breakpoints(config: &RunConfig) -> Vec<(f64, bool, bool)> {
    let mut pts: Vec<(f64, bool, bool)> = Vec::new();
    let n = ((config.t_final / config.sample_interval) + TIME_EPS).floor() as usize;
    for s in 0..=n {
        pts.push(((s as f64 * config.sample_interval).min(config.t_final), true, false));
    }
    if (pts.last().map_or(-1.0, |p| p.0) - config.t_final).abs() > TIME_EPS {
        pts.push((config.t_final, true, false));
    }
    for &t in &config.snapshot_times {
        if (0.0..=config.t_final + TIME_EPS).contains(&t) {
            pts.push((t.min(config.t_final), false, true));
        }
    }
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut merged: Vec<(f64, bool, bool)> = Vec::with_capacity(pts.len());
    for p in pts {
        match merged.last_mut() {
            Some(last) if (p.0 - last.0).abs() <= TIME_EPS => {
                last.1 |= p.1;
                last.2 |= p.2;
            }
            _ => merged.push(p),
        }
    }
    merged
}

/// Outcome of a completed run.
#[derive(Clone, Debug)]
pub struct RunOutput {
    pub records: Vec<DiagnosticsRecord>,
    pub state: SystemState,
    pub stats: SolveStats,
    pub steps: usize,
    pub summary: DriftSummary,
}

/// Runs `config`, writing artefacts to `config.output_dir` when set.
pub fn run_simulation(config: &RunConfig) -> Result<RunOutput> {
    let mut sim = Simulation::new(config)?;
    let mut writer = match &config.output_dir {
        Some(dir) => Some(RunWriter::create(dir, config)?),
        None => None,
    };
    let mut records = Vec::new();
    for (t, is_sample, is_snapshot) in breakpoints(config) {
        sim.advance_to(t)?;
        if is_sample {
            let r = sim.sample()?;
            if let Some(w) = writer.as_mut() {
                w.record(&r)?;
            }
            records.push(r);
        }
        if is_snapshot {
            if let Some(w) = writer.as_ref() {
                w.snapshot(sim.state())?;
            }
        }
    }
    let summary = DriftSummary::from_records(&records);
    if let Some(w) = writer.as_ref() {
        w.summary(&summary)?;
    }
    Ok(RunOutput {
        records,
        stats: sim.stats(),
        steps: sim.steps(),
        state: sim.into_state(),
        summary,
    })
}

/// Range of one quantity's relative drift over a run.
#[derive(Clone, Debug, PartialEq)]
pub struct DriftRange {
    pub name: &'static str,
    pub min: f64,
    pub max: f64,
}

/// Min/max relative drift per quantity plus the largest Gauss-law defect.
#[derive(Clone, Debug, PartialEq)]
pub struct DriftSummary {
    pub ranges: Vec<DriftRange>,
    pub max_gauss_law_defect: f64,
    /// Largest relative increase of `l2_f` between consecutive samples
    /// (zero or negative when the norm never grows).
    pub max_l2_increase: f64,
}

impl DriftSummary {
    pub fn from_records(records: &[DiagnosticsRecord]) -> Self {
        type Getter = fn(&DiagnosticsRecord) -> Option<f64>;
        let quantities: [(&'static str, Getter); 6] = [
            ("mass", |r| Some(r.mass)),
            ("total_energy", |r| Some(r.total_energy)),
            ("modified_energy", |r| r.modified_energy),
            ("momentum", |r| Some(r.momentum)),
            ("enstrophy", |r| Some(r.enstrophy)),
            ("l2_f", |r| Some(r.l2_f)),
        ];
        let mut ranges = Vec::new();
        if let Some(first) = records.first() {
            for (name, get) in quantities {
                let Some(q0) = get(first) else { continue };
                let drifts: Vec<f64> = records[1..]
                    .iter()
                    .filter_map(get)
                    .map(|q| relative_drift(q, q0))
                    .collect();
                let (min, max) = if drifts.is_empty() {
                    (0.0, 0.0)
                } else {
                    (
                        drifts.iter().copied().fold(f64::INFINITY, f64::min),
                        drifts.iter().copied().fold(0.0, f64::max),
                    )
                };
                ranges.push(DriftRange { name, min, max });
            }
        }
        let max_l2_increase = records
            .windows(2)
            .map(|w| (w[1].l2_f - w[0].l2_f) / w[0].l2_f.abs().max(1e-300))
            .fold(f64::NEG_INFINITY, f64::max);
        Self {
            ranges,
            max_gauss_law_defect: records.iter().map(|r| r.gauss_law_defect).fold(0.0, f64::max),
            max_l2_increase: if max_l2_increase.is_finite() { max_l2_increase } else { 0.0 },
        }
    }

    /// Maximum relative drift of a named quantity.
    pub fn max(&self, name: &str) -> Option<f64> {
        self.ranges.iter().find(|r| r.name == name).map(|r| r.max)
    }
}

impl fmt::Display for DriftSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "quantity,min_relative_drift,max_relative_drift")?;
        for r in &self.ranges {
            writeln!(f, "{},{:.6e},{:.6e}", r.name, r.min, r.max)?;
        }
        writeln!(f, "gauss_law_defect,,{:.6e}", self.max_gauss_law_defect)?;
        writeln!(f, "l2_f_increase,,{:.6e}", self.max_l2_increase)
    }
}
