#![allow(dead_code)]

use std::sync::Arc;

use vadg::harness::{initial_state, ProblemKind, RunConfig};
use vadg::integrators::{Scheme, SystemState};
use vadg::{BasisSpec, Discretization, DistributionField, PhaseMesh, SpaceKind};

pub fn disc(lx: f64, vc: f64, nx: usize, nv: usize, k: usize, kind: SpaceKind) -> Arc<Discretization> {
    Discretization::new(PhaseMesh::new(lx, vc, nx, nv).unwrap(), BasisSpec::new(k, kind).unwrap()).unwrap()
}

pub fn landau_config(scheme: Scheme, k: usize, kind: SpaceKind, nx: usize, nv: usize) -> RunConfig {
    let mut c = RunConfig::preset(ProblemKind::Landau);
    c.nx = nx;
    c.nv = nv;
    c.scheme.scheme = scheme;
    c.scheme.basis = BasisSpec::new(k, kind).unwrap();
    c
}

pub fn landau_state(scheme: Scheme, k: usize, kind: SpaceKind, nx: usize, nv: usize) -> (RunConfig, SystemState) {
    let c = landau_config(scheme, k, kind, nx, nv);
    let s = initial_state(&c).unwrap();
    (c, s)
}

/// Field from raw coefficients with the outermost velocity elements zeroed,
/// so nothing reaches the truncated boundary.
pub fn interior_field(d: &Arc<Discretization>, raw: &[f64]) -> DistributionField {
    let mut c: Vec<f64> = raw.iter().cycle().take(d.f_len()).copied().collect();
    let bl = d.block_len();
    let nv = d.mesh.nv();
    for i in 0..d.mesh.nx() {
        for j in [0, nv - 1] {
            let off = d.block_offset(i, j);
            c[off..off + bl].iter_mut().for_each(|x| *x = 0.0);
        }
    }
    DistributionField::from_coeffs(d, c).unwrap()
}

/// Sum of `R` weighted by the coefficients of `g`, i.e. the weak form
/// tested against `g`.
pub fn tested(r: &DistributionField, g: &DistributionField) -> f64 {
    r.coeffs().iter().zip(g.coeffs()).map(|(a, b)| a * b).sum()
}
