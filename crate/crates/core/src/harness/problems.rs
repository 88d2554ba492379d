//! Benchmark initial conditions.

use std::f64::consts::PI;
use std::sync::Arc;

use super::config::{InitialField, ProblemKind, ProblemParams, RunConfig};
use crate::dg::poisson_initial_e;
use crate::error::{Error, Result};
use crate::field::{DistributionField, ElectricField, XField, ION_DENSITY};
use crate::integrators::SystemState;
use crate::mesh::PhaseMesh;
use crate::space::Discretization;

/// Bump-on-tail population parameters.
pub const BUMP_DRIFT: f64 = 4.5;
pub const BUMP_THERMAL: f64 = 0.5;

fn inv_sqrt_2pi() -> f64 {
    1.0 / (2.0 * PI).sqrt()
}

/// Unit Maxwellian `exp(-v^2/2) / sqrt(2 pi)`.
pub fn maxwellian(v: f64) -> f64 {
    inv_sqrt_2pi() * (-0.5 * v * v).exp()
}

/// Velocity profile of the two-stream problem.
pub fn two_stream_profile(v: f64) -> f64 {
    v * v * maxwellian(v)
}

/// Velocity profile of the bump-on-tail problem; integrates to one.
pub fn bump_on_tail_profile(v: f64) -> f64 {
    let np = 0.9 * inv_sqrt_2pi();
    let nb = 0.2 * inv_sqrt_2pi();
    let w = (v - BUMP_DRIFT) / BUMP_THERMAL;
    np * (-0.5 * v * v).exp() + nb * (-0.5 * w * w).exp()
}

/// Closed-form `f0(x, v)` for a problem.
pub fn initial_condition(params: &ProblemParams) -> Result<Box<dyn Fn(f64, f64) -> f64 + Send + Sync>> {
    let (a, k) = (params.amplitude, params.wavenumber);
    if !(a.is_finite() && k.is_finite()) {
        return Err(Error::config("amplitude and wavenumber must be finite"));
    }
    let perturb = move |x: f64| 1.0 + a * (k * x).cos();
    Ok(match params.kind {
        ProblemKind::Landau => Box::new(move |x, v| maxwellian(v) * perturb(x)),
        ProblemKind::TwoStream => Box::new(move |x, v| two_stream_profile(v) * perturb(x)),
        ProblemKind::BumpOnTail => Box::new(move |x, v| bump_on_tail_profile(v) * perturb(x)),
        ProblemKind::Custom => {
            let pops = params.populations;
            if pops.iter().any(|p| !(p.thermal > 0.0) || !(p.density >= 0.0)) {
                return Err(Error::config("custom populations need density >= 0 and thermal > 0"));
            }
            Box::new(move |x, v| {
                let g: f64 = pops
                    .iter()
                    .map(|p| {
                        let w = (v - p.drift) / p.thermal;
                        p.density * inv_sqrt_2pi() / p.thermal * (-0.5 * w * w).exp()
                    })
                    .sum();
                g * perturb(x)
            })
        }
    })
}

/// Companion analytic field `(A / kappa) sin(kappa x)`.
pub fn analytic_field(params: &ProblemParams) -> impl Fn(f64) -> f64 {
    let (a, k) = (params.amplitude, params.wavenumber);
    move |x| a / k * (k * x).sin()
}

/// Builds the discretisation described by `config`.
pub fn discretization(config: &RunConfig) -> Result<Arc<Discretization>> {
    let mesh = PhaseMesh::new(config.problem.length, config.problem.vmax, config.nx, config.nv)?;
    Discretization::new(mesh, config.scheme.basis)
}

/// Projected initial state at `t = 0`.
pub fn initial_state(config: &RunConfig) -> Result<SystemState> {
    let d = discretization(config)?;
    let f0 = initial_condition(&config.problem)?;
    let f = DistributionField::project(&d, |x, v| f0(x, v));
    let e = initial_electric_field(&f, &config.problem)?;
    SystemState::new(f, e, 0.0)
}

fn initial_electric_field(f: &DistributionField, params: &ProblemParams) -> Result<ElectricField> {
    match params.e0 {
        InitialField::Analytic => Ok(XField::project(f.disc(), analytic_field(params))),
        InitialField::Poisson => {
            let rho = f.rho();
            // background ions neutralise the projected electron charge
            let rho_i = rho.integral() / f.disc().mesh.lx();
            if (rho_i - ION_DENSITY).abs() > 1e-2 {
                return Err(Error::IncompatibleCharge {
                    net: (rho_i - ION_DENSITY) * f.disc().mesh.lx(),
                });
            }
            poisson_initial_e(&rho, rho_i)
        }
    }
}
