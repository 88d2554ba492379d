//! Conservation, reversibility and CFL-sweep studies.

use std::fmt;

use super::config::{InitialField, RunConfig};
use super::problems::{analytic_field, initial_condition, initial_state};
use super::run::{run_simulation, DriftSummary};
use crate::error::{Error, Result};
use crate::integrators::{cfl_dt, step, SolveStats};

/// Runs `config` and reduces its series to drift extremes.
pub fn conservation_study(config: &RunConfig) -> Result<DriftSummary> {
    Ok(run_simulation(config)?.summary)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReversibilityRow {
    pub nx: usize,
    pub nv: usize,
    pub h: f64,
    pub dt: f64,
    pub steps: usize,
    pub error_f: f64,
    pub error_e: f64,
    /// Observed order against the previous row (`None` for the first mesh).
    pub order_f: Option<f64>,
    pub order_e: Option<f64>,
}

/// Step size for the reversibility study on a mesh of size `h`.
///
/// The CFL step is rescaled by `h^((k+1)/p - 1)`, which makes the temporal
/// error `O(dt^p)` match the spatial error `O(h^(k+1))`.
pub fn reversibility_dt(config: &RunConfig, h: f64, base_dt: f64) -> f64 {
    let k = config.scheme.basis.degree as f64;
    let p = config.scheme.scheme.order() as f64;
    base_dt * h.powf((k + 1.0) / p - 1.0)
}

/// Runs forward to `t_half`, reflects `v`, runs another `t_half` and
/// compares with the exact reflected initial data. The field is compared with
/// its closed form when the problem has one and with its discrete initial
/// value otherwise.
pub fn reversibility_study(
    config: &RunConfig,
    t_half: f64,
    meshes: &[usize],
) -> Result<Vec<ReversibilityRow>> {
    if !(t_half.is_finite() && t_half > 0.0) {
        return Err(Error::config("t_half must be positive"));
    }
    let f0 = initial_condition(&config.problem)?;
    let e0 = analytic_field(&config.problem);
    let mut rows: Vec<ReversibilityRow> = Vec::new();
    for &size in meshes {
        let mut cfg = config.clone();
        cfg.nx = size;
        cfg.nv = size;
        cfg.validate()?;
        let s0 = initial_state(&cfg)?;
        let mesh = &s0.f.disc().mesh;
        let h = mesh.dx().min(mesh.dv());
        let base = cfl_dt(mesh, s0.e.max_abs_nodal(), cfg.scheme.cfl);
        let raw = reversibility_dt(&cfg, h, base);
        let steps = (t_half / raw).ceil().max(1.0) as usize;
        let dt = t_half / steps as f64;

        let mut s = s0.clone();
        for pass in 0..2 {
            if pass == 1 {
                s.f = s.f.reflect_v();
            }
            for _ in 0..steps {
                let t0 = s.t;
                s = step(&s, dt, &cfg.scheme)
                    .map_err(|e| Error::StepFailed {
                        t: t0,
                        cfl: cfg.scheme.cfl,
                        source: Box::new(e),
                    })?
                    .0;
            }
        }
        let error_f = s.f.l2_error(|x, v| f0(x, -v));
        let error_e = match cfg.problem.e0 {
            InitialField::Analytic => s.e.l2_error(&e0),
            InitialField::Poisson => s.e.l2_distance(&s0.e)?,
        };
        let order = |prev: f64, cur: f64, hp: f64| (prev / cur).ln() / (hp / h).ln();
        let (order_f, order_e) = match rows.last() {
            Some(p) => (Some(order(p.error_f, error_f, p.h)), Some(order(p.error_e, error_e, p.h))),
            None => (None, None),
        };
        rows.push(ReversibilityRow {
            nx: size,
            nv: size,
            h,
            dt,
            steps,
            error_f,
            error_e,
            order_f,
            order_e,
        });
    }
    Ok(rows)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub cfl: f64,
    pub dt: f64,
    pub steps: usize,
    /// Mean Newton iterations per nonlinear solve.
    pub nni: f64,
    /// Mean Krylov iterations per nonlinear solve (per linear solve for
    /// schemes without a Newton stage).
    pub nli: f64,
    pub stats: SolveStats,
    /// Error message when the run failed at this CFL.
    pub failure: Option<String>,
}

/// Runs `config` at every CFL in `cfl_list`. Failures are recorded, not raised.
pub fn cfl_sweep(config: &RunConfig, cfl_list: &[f64]) -> Result<Vec<SweepRow>> {
    if !config.scheme.scheme.is_implicit() {
        return Err(Error::config("the CFL sweep needs an implicit scheme"));
    }
    let mut rows = Vec::with_capacity(cfl_list.len());
    for &cfl in cfl_list {
        let mut cfg = config.clone();
        cfg.scheme.cfl = cfl;
        cfg.output_dir = None;
        // one interval so the step is never clipped by the sampling cadence
        cfg.sample_interval = cfg.t_final.max(f64::MIN_POSITIVE);
        cfg.snapshot_times.clear();
        cfg.validate()?;
        let row = match run_simulation(&cfg) {
            Ok(out) => {
                let s = out.stats;
                SweepRow {
                    cfl,
                    dt: cfg.t_final / out.steps.max(1) as f64,
                    steps: out.steps,
                    nni: s.nni(),
                    nli: if s.newton_solves > 0 { s.nli() } else { s.linear_mean() },
                    stats: s,
                    failure: None,
                }
            }
            Err(e) if e.is_solver_failure() => SweepRow {
                cfl,
                dt: f64::NAN,
                steps: 0,
                nni: f64::NAN,
                nli: f64::NAN,
                stats: SolveStats::default(),
                failure: Some(e.to_string()),
            },
            Err(e) => return Err(e),
        };
        rows.push(row);
    }
    Ok(rows)
}

/// CSV rendering of study tables.
pub struct Table<'a, T>(pub &'a [T]);

fn opt(v: Option<f64>) -> String {
    v.map_or_else(String::new, |x| format!("{x:.4}"))
}

impl fmt::Display for Table<'_, ReversibilityRow> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "nx,nv,h,dt,steps,error_f,error_e,order_f,order_e")?;
        for r in self.0 {
            writeln!(
                f,
                "{},{},{:.6e},{:.6e},{},{:.6e},{:.6e},{},{}",
                r.nx,
                r.nv,
                r.h,
                r.dt,
                r.steps,
                r.error_f,
                r.error_e,
                opt(r.order_f),
                opt(r.order_e)
            )?;
        }
        Ok(())
    }
}

impl fmt::Display for Table<'_, SweepRow> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "cfl,dt,steps,nni,nli,failure")?;
        for r in self.0 {
            writeln!(
                f,
                "{},{:.6e},{},{:.4},{:.4},{}",
                r.cfl,
                r.dt,
                r.steps,
                r.nni,
                r.nli,
                r.failure.as_deref().unwrap_or("").replace(',', ";")
            )?;
        }
        Ok(())
    }
}
