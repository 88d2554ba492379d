//! Run configuration and its `[section]` / `key = value` text format.
//!
//! ```text
//! [problem]
//! name = landau          # landau | two_stream | bump_on_tail | custom
//! amplitude = 0.5
//! [mesh]
//! nx = 40
//! nv = 80
//! [scheme]
//! name = s4
//! space = q
//! ```
//!
//! Every key is optional. Benchmark presets supply the problem parameters
//! (amplitude, wavenumber, length, vmax) unless they are given explicitly.
//! `#` starts a comment. Overrides use the dotted form `section.key=value`.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::basis::{BasisSpec, SpaceKind};
use crate::dg::FluxMode;
use crate::error::{Error, Result};
use crate::integrators::{Scheme, SchemeConfig};
use crate::solver::SolverSettings;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ProblemKind {
    Landau,
    TwoStream,
    BumpOnTail,
    Custom,
}

impl ProblemKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ProblemKind::Landau => "landau",
            ProblemKind::TwoStream => "two_stream",
            ProblemKind::BumpOnTail => "bump_on_tail",
            ProblemKind::Custom => "custom",
        }
    }
}

impl FromStr for ProblemKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "landau" => Ok(ProblemKind::Landau),
            "two_stream" | "twostream" => Ok(ProblemKind::TwoStream),
            "bump_on_tail" | "bumpontail" => Ok(ProblemKind::BumpOnTail),
            "custom" => Ok(ProblemKind::Custom),
            other => Err(Error::config(format!("unknown problem `{other}`"))),
        }
    }
}

/// How the initial electric field is obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum InitialField {
    /// `(A / kappa) sin(kappa x)` projected onto the x-space.
    Analytic,
    /// Discrete Gauss-law solve from the projected charge density.
    Poisson,
}

impl InitialField {
    pub fn as_str(self) -> &'static str {
        match self {
            InitialField::Analytic => "analytic",
            InitialField::Poisson => "poisson",
        }
    }
}

impl FromStr for InitialField {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "analytic" => Ok(InitialField::Analytic),
            "poisson" => Ok(InitialField::Poisson),
            other => Err(Error::config(format!("unknown initial field `{other}`"))),
        }
    }
}

/// One Maxwellian population `n / (sqrt(2 pi) vt) exp(-(v - u)^2 / (2 vt^2))`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Population {
    pub density: f64,
    pub drift: f64,
    pub thermal: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProblemParams {
    pub kind: ProblemKind,
    pub amplitude: f64,
    pub wavenumber: f64,
    pub length: f64,
    pub vmax: f64,
    pub e0: InitialField,
    /// Velocity profile of the custom problem (unused by the presets).
    pub populations: [Population; 2],
}

impl ProblemParams {
    /// Parameter tuple of a benchmark preset.
    pub fn preset(kind: ProblemKind) -> Self {
        use std::f64::consts::PI;
        let (amplitude, wavenumber, length, vmax) = match kind {
            ProblemKind::Landau => (0.5, 0.5, 4.0 * PI, 8.0),
            ProblemKind::TwoStream => (0.05, 0.5, 4.0 * PI, 8.0),
            ProblemKind::BumpOnTail => (0.04, 0.3, 20.0 * PI / 3.0, 13.0),
            ProblemKind::Custom => (0.01, 0.5, 4.0 * PI, 8.0),
        };
        let e0 = if kind == ProblemKind::Custom {
            InitialField::Poisson
        } else {
            InitialField::Analytic
        };
        Self {
            kind,
            amplitude,
            wavenumber,
            length,
            vmax,
            e0,
            populations: [
                Population {
                    density: 1.0,
                    drift: 0.0,
                    thermal: 1.0,
                },
                Population {
                    density: 0.0,
                    drift: 0.0,
                    thermal: 1.0,
                },
            ],
        }
    }
}

/// Parameters of the convergence and CFL-sweep studies.
#[derive(Clone, Debug, PartialEq)]
pub struct StudyParams {
    pub cfl_list: Vec<f64>,
    /// Mesh sizes `n` for `n x n` meshes in the reversibility study.
    pub meshes: Vec<usize>,
    pub t_half: f64,
}

impl Default for StudyParams {
    fn default() -> Self {
        Self {
            cfl_list: vec![1.0, 10.0, 40.0],
            meshes: vec![20, 40, 80],
            t_half: 5.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub problem: ProblemParams,
    pub nx: usize,
    pub nv: usize,
    pub scheme: SchemeConfig,
    pub t_final: f64,
    pub sample_interval: f64,
    pub snapshot_times: Vec<f64>,
    pub output_dir: Option<PathBuf>,
    /// On a solver failure, retry the sample interval with half the step (up to 4 times).
    pub retry_halved_dt: bool,
    pub study: StudyParams,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self::preset(ProblemKind::Landau)
    }
}

const KEYS: &[&str] = &[
    "problem.name",
    "problem.amplitude",
    "problem.wavenumber",
    "problem.length",
    "problem.vmax",
    "problem.e0",
    "problem.density1",
    "problem.drift1",
    "problem.thermal1",
    "problem.density2",
    "problem.drift2",
    "problem.thermal2",
    "mesh.nx",
    "mesh.nv",
    "scheme.name",
    "scheme.flux",
    "scheme.degree",
    "scheme.space",
    "scheme.cfl",
    "solver.eps_tol",
    "solver.lin_tol",
    "solver.max_newton",
    "solver.krylov_dim",
    "solver.max_restarts",
    "run.t_final",
    "run.sample_interval",
    "run.snapshot_times",
    "run.output_dir",
    "run.retry_halved_dt",
    "study.cfl_list",
    "study.meshes",
    "study.t_half",
];

fn parse_value<T: FromStr>(key: &str, raw: &str) -> Result<T> {
    raw.parse::<T>()
        .map_err(|_| Error::config(format!("cannot parse `{raw}` for {key}")))
}

fn parse_list<T: FromStr>(key: &str, raw: &str) -> Result<Vec<T>> {
    raw.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_value(key, s))
        .collect()
}

fn join<T: fmt::Display>(xs: &[T]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

impl RunConfig {
    pub fn preset(kind: ProblemKind) -> Self {
        let basis = BasisSpec::new(2, SpaceKind::TotalDegreeP).expect("degree 2 is valid");
        Self {
            problem: ProblemParams::preset(kind),
            nx: 40,
            nv: 80,
            scheme: SchemeConfig {
                scheme: Scheme::S1,
                flux: FluxMode::Upwind,
                basis,
                cfl: 0.13,
                solver: SolverSettings::default(),
            },
            t_final: 10.0,
            sample_interval: 0.1,
            snapshot_times: Vec::new(),
            output_dir: None,
            retry_halved_dt: false,
            study: StudyParams::default(),
        }
    }

    /// Parses the text format, then applies `overrides` (`section.key=value`).
    pub fn parse(text: &str, overrides: &[String]) -> Result<Self> {
        let mut map = BTreeMap::new();
        let mut section = String::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                section = name.trim().to_ascii_lowercase();
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                Error::config(format!("line {}: expected `key = value`", lineno + 1))
            })?;
            if section.is_empty() {
                return Err(Error::config(format!("line {}: key outside a section", lineno + 1)));
            }
            map.insert(format!("{section}.{}", k.trim().to_ascii_lowercase()), v.trim().to_string());
        }
        for o in overrides {
            let (k, v) = o
                .split_once('=')
                .ok_or_else(|| Error::config(format!("override `{o}` is not key=value")))?;
            map.insert(k.trim().to_ascii_lowercase(), v.trim().to_string());
        }
        Self::from_map(&map)
    }

    fn from_map(map: &BTreeMap<String, String>) -> Result<Self> {
        if let Some(bad) = map.keys().find(|k| !KEYS.contains(&k.as_str())) {
            return Err(Error::config(format!("unknown key `{bad}`")));
        }
        let get = |k: &str| map.get(k).map(String::as_str);
        let kind = match get("problem.name") {
            Some(v) => v.parse()?,
            None => ProblemKind::Landau,
        };
        let mut c = Self::preset(kind);

        macro_rules! set {
            ($key:literal, $target:expr) => {
                if let Some(v) = get($key) {
                    $target = parse_value($key, v)?;
                }
            };
        }
        let p = &mut c.problem;
        set!("problem.amplitude", p.amplitude);
        set!("problem.wavenumber", p.wavenumber);
        set!("problem.length", p.length);
        set!("problem.vmax", p.vmax);
        set!("problem.e0", p.e0);
        set!("problem.density1", p.populations[0].density);
        set!("problem.drift1", p.populations[0].drift);
        set!("problem.thermal1", p.populations[0].thermal);
        set!("problem.density2", p.populations[1].density);
        set!("problem.drift2", p.populations[1].drift);
        set!("problem.thermal2", p.populations[1].thermal);
        set!("mesh.nx", c.nx);
        set!("mesh.nv", c.nv);
        let s = &mut c.scheme;
        set!("scheme.name", s.scheme);
        set!("scheme.flux", s.flux);
        set!("scheme.cfl", s.cfl);
        let mut degree = s.basis.degree;
        let mut kind = s.basis.kind;
        set!("scheme.degree", degree);
        set!("scheme.space", kind);
        s.basis = BasisSpec::new(degree, kind)?;
        set!("solver.eps_tol", s.solver.eps_tol);
        set!("solver.lin_tol", s.solver.lin_tol);
        set!("solver.max_newton", s.solver.max_newton);
        set!("solver.krylov_dim", s.solver.krylov_dim);
        set!("solver.max_restarts", s.solver.max_restarts);
        set!("run.t_final", c.t_final);
        set!("run.sample_interval", c.sample_interval);
        set!("run.retry_halved_dt", c.retry_halved_dt);
        if let Some(v) = get("run.snapshot_times") {
            c.snapshot_times = parse_list("run.snapshot_times", v)?;
        }
        if let Some(v) = get("run.output_dir") {
            c.output_dir = Some(PathBuf::from(v));
        }
        if let Some(v) = get("study.cfl_list") {
            c.study.cfl_list = parse_list("study.cfl_list", v)?;
        }
        if let Some(v) = get("study.meshes") {
            c.study.meshes = parse_list("study.meshes", v)?;
        }
        set!("study.t_half", c.study.t_half);
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        let p = &self.problem;
        let positive = |name: &str, v: f64| -> Result<()> {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::config(format!("{name} must be positive, got {v}")))
            }
        };
        positive("problem.wavenumber", p.wavenumber)?;
        positive("problem.length", p.length)?;
        positive("problem.vmax", p.vmax)?;
        if !p.amplitude.is_finite() {
            return Err(Error::config("problem.amplitude must be finite"));
        }
        if p.kind == ProblemKind::Custom {
            for pop in &p.populations {
                positive("problem.thermal", pop.thermal)?;
                if !(pop.density.is_finite() && pop.density >= 0.0) {
                    return Err(Error::config("population densities must be non-negative"));
                }
            }
        }
        if self.nx == 0 || self.nv == 0 {
            return Err(Error::config("mesh sizes must be positive"));
        }
        self.scheme.validate()?;
        if !(self.t_final.is_finite() && self.t_final >= 0.0) {
            return Err(Error::config("run.t_final must be non-negative"));
        }
        positive("run.sample_interval", self.sample_interval)?;
        positive("study.t_half", self.study.t_half)?;
        if self.study.cfl_list.iter().any(|&c| !(c > 0.0)) {
            return Err(Error::config("study.cfl_list entries must be positive"));
        }
        if self.study.meshes.contains(&0) {
            return Err(Error::config("study.meshes entries must be positive"));
        }
        Ok(())
    }
}

impl FromStr for RunConfig {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s, &[])
    }
}

impl fmt::Display for RunConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = &self.problem;
        let s = &self.scheme;
        writeln!(f, "[problem]")?;
        writeln!(f, "name = {}", p.kind.as_str())?;
        writeln!(f, "amplitude = {}", p.amplitude)?;
        writeln!(f, "wavenumber = {}", p.wavenumber)?;
        writeln!(f, "length = {}", p.length)?;
        writeln!(f, "vmax = {}", p.vmax)?;
        writeln!(f, "e0 = {}", p.e0.as_str())?;
        for (idx, pop) in p.populations.iter().enumerate() {
            writeln!(f, "density{} = {}", idx + 1, pop.density)?;
            writeln!(f, "drift{} = {}", idx + 1, pop.drift)?;
            writeln!(f, "thermal{} = {}", idx + 1, pop.thermal)?;
        }
        writeln!(f, "\n[mesh]\nnx = {}\nnv = {}", self.nx, self.nv)?;
        writeln!(f, "\n[scheme]")?;
        writeln!(f, "name = {}", s.scheme.as_str())?;
        writeln!(f, "flux = {}", s.flux.as_str())?;
        writeln!(f, "degree = {}", s.basis.degree)?;
        writeln!(f, "space = {}", s.basis.kind.as_str())?;
        writeln!(f, "cfl = {}", s.cfl)?;
        writeln!(f, "\n[solver]")?;
        writeln!(f, "eps_tol = {}", s.solver.eps_tol)?;
        writeln!(f, "lin_tol = {}", s.solver.lin_tol)?;
        writeln!(f, "max_newton = {}", s.solver.max_newton)?;
        writeln!(f, "krylov_dim = {}", s.solver.krylov_dim)?;
        writeln!(f, "max_restarts = {}", s.solver.max_restarts)?;
        writeln!(f, "\n[run]")?;
        writeln!(f, "t_final = {}", self.t_final)?;
        writeln!(f, "sample_interval = {}", self.sample_interval)?;
        writeln!(f, "snapshot_times = {}", join(&self.snapshot_times))?;
        if let Some(dir) = &self.output_dir {
            writeln!(f, "output_dir = {}", dir.display())?;
        }
        writeln!(f, "retry_halved_dt = {}", self.retry_halved_dt)?;
        writeln!(f, "\n[study]")?;
        writeln!(f, "cfl_list = {}", join(&self.study.cfl_list))?;
        writeln!(f, "meshes = {}", join(&self.study.meshes))?;
        writeln!(f, "t_half = {}", self.study.t_half)
    }
}
