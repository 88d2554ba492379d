//! Time integrators.
//!
//! * Scheme-1: explicit second-order midpoint scheme.
//! * Scheme-2: implicit midpoint on the coupled `(f, E)` system.
//! * Scheme-3: E half-step, linear implicit-midpoint Vlasov solve, E half-step.
//! * Scheme-4: `a(dt/2) b(dt) a(dt/2)` with `a` the x-advection and `b` the
//!   coupled acceleration/Ampère flow, both by implicit midpoint.
//! * Scheme-2F/3F/4F: triple-jump compositions of the above.

mod compose;
mod explicit;
mod implicit;
mod split;

use std::ops::AddAssign;
use std::str::FromStr;

use crate::basis::{BasisSpec, SpaceKind};
use crate::dg::FluxMode;
use crate::error::{Error, Result};
use crate::field::{DistributionField, ElectricField};
use crate::mesh::PhaseMesh;
use crate::solver::SolverSettings;

pub use compose::{compose_triple_jump, TripleJump};
pub use explicit::step_scheme1;
pub use implicit::{step_scheme2, step_scheme3, step_scheme3_detailed, Scheme3Step};
pub use split::{scheme_a, scheme_b, scheme_b_node, step_scheme4};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Scheme {
    S1,
    S2,
    S3,
    S4,
    S2F,
    S3F,
    S4F,
}

impl Scheme {
    pub const ALL: [Scheme; 7] = [
        Scheme::S1,
        Scheme::S2,
        Scheme::S3,
        Scheme::S4,
        Scheme::S2F,
        Scheme::S3F,
        Scheme::S4F,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::S1 => "s1",
            Scheme::S2 => "s2",
            Scheme::S3 => "s3",
            Scheme::S4 => "s4",
            Scheme::S2F => "s2f",
            Scheme::S3F => "s3f",
            Scheme::S4F => "s4f",
        }
    }

    /// The second-order scheme a triple-jump scheme is built from.
    pub fn base(self) -> Scheme {
        match self {
            Scheme::S2F => Scheme::S2,
            Scheme::S3F => Scheme::S3,
            Scheme::S4F => Scheme::S4,
            s => s,
        }
    }

    pub fn is_composite(self) -> bool {
        self.base() != self
    }

    pub fn is_implicit(self) -> bool {
        self != Scheme::S1
    }

    /// Temporal order of accuracy.
    pub fn order(self) -> u32 {
        if self.is_composite() {
            4
        } else {
            2
        }
    }

    pub fn requires_tensor(self) -> bool {
        self.base() == Scheme::S4
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.to_ascii_lowercase().replace(['-', '_', ' '], "");
        let key = key.strip_prefix("scheme").unwrap_or(&key);
        let key = key.strip_prefix('s').unwrap_or(key);
        Scheme::ALL
            .into_iter()
            .find(|sc| &sc.as_str()[1..] == key)
            .ok_or_else(|| Error::config(format!("unknown scheme `{s}`")))
    }
}

/// Everything a stepper needs besides the state and the step size.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SchemeConfig {
    pub scheme: Scheme,
    pub flux: FluxMode,
    pub basis: BasisSpec,
    pub cfl: f64,
    pub solver: SolverSettings,
}

impl SchemeConfig {
    pub fn new(scheme: Scheme, flux: FluxMode, basis: BasisSpec, cfl: f64) -> Result<Self> {
        let cfg = Self {
            scheme,
            flux,
            basis,
            cfl,
            solver: SolverSettings::default(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.scheme.requires_tensor() && self.basis.kind != SpaceKind::TensorQ {
            return Err(Error::config(format!(
                "{} needs the tensor-product space",
                self.scheme.as_str()
            )));
        }
        if !(self.cfl.is_finite() && self.cfl > 0.0) {
            return Err(Error::config(format!("CFL must be positive, got {}", self.cfl)));
        }
        self.solver.validate()
    }

    pub fn with_flux(mut self, flux: FluxMode) -> Self {
        self.flux = flux;
        self
    }

    pub fn with_scheme(mut self, scheme: Scheme) -> Self {
        self.scheme = scheme;
        self
    }
}

/// `(f, E)` at time `t`.
#[derive(Clone, Debug)]
pub struct SystemState {
    pub f: DistributionField,
    pub e: ElectricField,
    pub t: f64,
}

impl SystemState {
    pub fn new(f: DistributionField, e: ElectricField, t: f64) -> Result<Self> {
        if !f.disc().same_space(e.disc()) {
            return Err(Error::config("distribution and electric field use different meshes"));
        }
        Ok(Self { f, e, t })
    }
}

/// Iteration counts accumulated over one or more steps.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SolveStats {
    /// Nonlinear (Newton) solves performed.
    pub newton_solves: usize,
    pub newton_iterations: usize,
    /// Krylov iterations inside Newton solves.
    pub newton_krylov_iterations: usize,
    /// Stand-alone linear solves performed.
    pub linear_solves: usize,
    pub linear_iterations: usize,
}

impl SolveStats {
    /// Mean Newton iterations per nonlinear solve.
    pub fn nni(&self) -> f64 {
        ratio(self.newton_iterations, self.newton_solves)
    }

    /// Mean Krylov iterations per nonlinear solve.
    pub fn nli(&self) -> f64 {
        ratio(self.newton_krylov_iterations, self.newton_solves)
    }

    /// Mean Krylov iterations per stand-alone linear solve.
    pub fn linear_mean(&self) -> f64 {
        ratio(self.linear_iterations, self.linear_solves)
    }
}

fn ratio(a: usize, b: usize) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}

impl AddAssign for SolveStats {
    fn add_assign(&mut self, o: Self) {
        self.newton_solves += o.newton_solves;
        self.newton_iterations += o.newton_iterations;
        self.newton_krylov_iterations += o.newton_krylov_iterations;
        self.linear_solves += o.linear_solves;
        self.linear_iterations += o.linear_iterations;
    }
}

/// Explicit step size `cfl / (vc/dx + emax/dv)`.
pub fn cfl_dt(mesh: &PhaseMesh, emax: f64, cfl: f64) -> f64 {
    cfl / (mesh.vc() / mesh.dx() + emax.abs() / mesh.dv())
}

/// Advances `state` by `dt` with the configured scheme.
pub fn step(state: &SystemState, dt: f64, config: &SchemeConfig) -> Result<(SystemState, SolveStats)> {
    match config.scheme {
        Scheme::S1 => Ok((step_scheme1(state, dt, config)?, SolveStats::default())),
        Scheme::S2 => step_scheme2(state, dt, config),
        Scheme::S3 => step_scheme3(state, dt, config),
        Scheme::S4 => step_scheme4(state, dt, config),
        s => compose_triple_jump(s.base(), state, dt, config),
    }
}
