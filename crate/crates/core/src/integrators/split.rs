//! Dimension splitting for tensor-product spaces.
//!
//! Scheme-a advects each v Gauss line `(j, m)` in x with its constant speed;
//! Scheme-b evolves each x Gauss node `(i, l)` in v together with the local
//! field value. Both use implicit midpoint. The nodal/modal switches are exact
//! because the `k+1` point Gauss rule diagonalises the Legendre mass matrix.

use super::{SchemeConfig, SolveStats, SystemState};
use crate::basis::SpaceKind;
use crate::dg::flux;
use crate::error::{Error, Result, SolverError};
use crate::field::{DistributionField, ElectricField, XField};
use crate::par;
use crate::solver::{gmres_solve, jfnk_solve, NewtonStats};
use crate::space::Discretization;

fn require_tensor(d: &Discretization) -> Result<()> {
    if d.spec.kind == SpaceKind::TensorQ {
        Ok(())
    } else {
        Err(Error::config("split schemes need the tensor-product space"))
    }
}

/// Weak 1D periodic transport residual with constant speed `s`.
fn transport_1d(d: &Discretization, s: f64, theta: f64, u: &[f64], out: &mut [f64]) {
    let lb = &d.line;
    let n = d.n();
    let nx = u.len() / n;
    let trace = |i: usize, ends: &[f64]| -> f64 { (0..n).map(|a| u[i * n + a] * ends[a]).sum() };
    let edge = |i: usize| -> f64 {
        // flux at the right edge of element i
        flux(trace(i, &lb.right), trace((i + 1) % nx, &lb.left), s, theta)
    };
    let mut left_flux = edge(nx - 1);
    for i in 0..nx {
        let right_flux = edge(i);
        for a in 0..n {
            let vol: f64 = (0..n).map(|b| u[i * n + b] * lb.stiff[b * n + a]).sum();
            out[i * n + a] = -s * vol + right_flux * lb.right[a] - left_flux * lb.left[a];
        }
        left_flux = right_flux;
    }
}

/// Weak 1D acceleration residual on one velocity line with zero exterior traces.
fn accel_1d(d: &Discretization, e: f64, theta: f64, g: &[f64], out: &mut [f64]) {
    let lb = &d.line;
    let n = d.n();
    let nv = g.len() / n;
    let trace = |j: usize, ends: &[f64]| -> f64 { (0..n).map(|b| g[j * n + b] * ends[b]).sum() };
    let mut lower_flux = flux(0.0, trace(0, &lb.left), e, theta);
    for j in 0..nv {
        let above = if j + 1 < nv { trace(j + 1, &lb.left) } else { 0.0 };
        let upper_flux = flux(trace(j, &lb.right), above, e, theta);
        for b in 0..n {
            let vol: f64 = (0..n).map(|c| g[j * n + c] * lb.stiff[c * n + b]).sum();
            out[j * n + b] = -e * vol + upper_flux * lb.right[b] - lower_flux * lb.left[b];
        }
        lower_flux = upper_flux;
    }
}

fn first_error<T>(results: Vec<std::result::Result<T, SolverError>>) -> Result<Vec<T>> {
    results.into_iter().map(|r| r.map_err(Error::from)).collect()
}

/// Implicit-midpoint x-advection along every v Gauss line.
pub fn scheme_a(
    f: &DistributionField,
    dt: f64,
    config: &SchemeConfig,
) -> Result<(DistributionField, SolveStats)> {
    let d = f.disc();
    require_tensor(d)?;
    let lb = &d.line;
    let (n, nx, nv) = (d.n(), d.mesh.nx(), d.mesh.nv());
    let c = f.coeffs();
    let theta = config.flux.theta();
    let k = dt / d.mesh.dx();
    let len = nx * n;
    let settings = {
        let mut s = config.solver.with_lin_tol(config.solver.eps_tol);
        s.krylov_dim = s.krylov_dim.max(len.min(300));
        s
    };

    let lines = par::map_indexed(nv * n, |line| {
        let (j, m) = (line / n, line % n);
        let mut u = vec![0.0; len];
        for i in 0..nx {
            let block = &c[d.block_offset(i, j)..][..n * n];
            for a in 0..n {
                u[i * n + a] = (0..n).map(|b| block[a * n + b] * lb.phi(m, b)).sum();
            }
        }
        let s = d.vnodes[j * n + m];
        if s == 0.0 || dt == 0.0 {
            return Ok((u, 0));
        }
        let mut r = vec![0.0; len];
        transport_1d(d, s, theta, &u, &mut r);
        let rhs: Vec<f64> = u.iter().zip(&r).map(|(u, r)| u - k * r).collect();
        let op = |x: &[f64], y: &mut [f64]| {
            transport_1d(d, s, theta, x, y);
            for (yk, xk) in y.iter_mut().zip(x) {
                *yk = xk + k * *yk;
            }
        };
        gmres_solve(op, &rhs, &u, &settings).map(|sol| (sol.x, sol.iterations))
    });
    let lines = first_error(lines)?;

    let mut out = vec![0.0; c.len()];
    let mut stats = SolveStats::default();
    for (line, (g, its)) in lines.iter().enumerate() {
        let (j, m) = (line / n, line % n);
        if d.vnodes[j * n + m] != 0.0 && dt != 0.0 {
            stats.linear_solves += 1;
            stats.linear_iterations += its;
        }
        for i in 0..nx {
            let block = &mut out[d.block_offset(i, j)..][..n * n];
            for a in 0..n {
                let ga = g[i * n + a] * lb.weight(m);
                for b in 0..n {
                    block[a * n + b] += ga * lb.phi(m, b);
                }
            }
        }
    }
    Ok((DistributionField::from_coeffs(d, out)?, stats))
}

/// Solves Scheme-b at a single x node.
///
/// `g0` holds the v-modal coefficients `[j * (k+1) + b]` of `f` at that node
/// and `e0` the field value. Returns the new coefficients, field value and
/// Newton statistics.
pub fn scheme_b_node(
    d: &Discretization,
    g0: &[f64],
    e0: f64,
    dt: f64,
    config: &SchemeConfig,
) -> std::result::Result<(Vec<f64>, f64, NewtonStats), SolverError> {
    let ng = g0.len();
    let theta = config.flux.theta();
    let k = 2.0 * dt / d.mesh.dv();
    let mom1 = &d.moments[1];
    let j0: f64 = g0.iter().zip(mom1).map(|(g, m)| g * m).sum();

    let mut gbar = vec![0.0; ng];
    let mut r = vec![0.0; ng];
    let residual = |u: &[f64], out: &mut [f64]| {
        let (g, e) = (&u[..ng], u[ng]);
        for q in 0..ng {
            gbar[q] = 0.5 * (g[q] + g0[q]);
        }
        accel_1d(d, 0.5 * (e + e0), theta, &gbar, &mut r);
        for q in 0..ng {
            out[q] = g[q] - g0[q] + k * r[q];
        }
        let j1: f64 = g.iter().zip(mom1).map(|(g, m)| g * m).sum();
        out[ng] = e - e0 + 0.5 * dt * (j0 + j1);
    };
    let mut u0 = g0.to_vec();
    u0.push(e0);
    let (mut u, stats) = jfnk_solve(residual, &u0, &config.solver)?;
    let e = u.pop().expect("unknown vector holds the field value");
    Ok((u, e, stats))
}

/// Implicit-midpoint acceleration coupled with Ampère's law at every x Gauss node.
pub fn scheme_b(
    f: &DistributionField,
    e: &ElectricField,
    dt: f64,
    config: &SchemeConfig,
) -> Result<(DistributionField, ElectricField, SolveStats)> {
    let d = f.disc();
    require_tensor(d)?;
    let lb = &d.line;
    let (n, nx, nv) = (d.n(), d.mesh.nx(), d.mesh.nv());
    let c = f.coeffs();
    let ec = e.coeffs();
    if ec.len() != d.x_len() {
        return Err(Error::Shape {
            expected: d.x_len(),
            found: ec.len(),
        });
    }

    let nodes = par::map_indexed(nx * n, |node| {
        let (i, l) = (node / n, node % n);
        let mut g0 = vec![0.0; nv * n];
        for j in 0..nv {
            let block = &c[d.block_offset(i, j)..][..n * n];
            for b in 0..n {
                g0[j * n + b] = (0..n).map(|a| block[a * n + b] * lb.phi(l, a)).sum();
            }
        }
        let e0: f64 = (0..n).map(|a| ec[i * n + a] * lb.phi(l, a)).sum();
        scheme_b_node(d, &g0, e0, dt, config)
    });
    let nodes = first_error(nodes)?;

    let mut out = vec![0.0; c.len()];
    let mut e_out = vec![0.0; ec.len()];
    let mut stats = SolveStats::default();
    for (node, (g, e_node, ns)) in nodes.iter().enumerate() {
        let (i, l) = (node / n, node % n);
        stats.newton_solves += 1;
        stats.newton_iterations += ns.nni;
        stats.newton_krylov_iterations += ns.nli;
        for a in 0..n {
            let wp = lb.weight(l) * lb.phi(l, a);
            e_out[i * n + a] += wp * e_node;
            for j in 0..nv {
                let block = &mut out[d.block_offset(i, j)..][..n * n];
                for b in 0..n {
                    block[a * n + b] += wp * g[j * n + b];
                }
            }
        }
    }
    Ok((
        DistributionField::from_coeffs(d, out)?,
        XField::from_coeffs(d, e_out)?,
        stats,
    ))
}

/// Strang composition `a(dt/2) b(dt) a(dt/2)`.
pub fn step_scheme4(
    state: &SystemState,
    dt: f64,
    config: &SchemeConfig,
) -> Result<(SystemState, SolveStats)> {
    let (f1, mut stats) = scheme_a(&state.f, 0.5 * dt, config)?;
    let (f2, e2, sb) = scheme_b(&f1, &state.e, dt, config)?;
    let (f3, sa) = scheme_a(&f2, 0.5 * dt, config)?;
    stats += sb;
    stats += sa;
    Ok((SystemState::new(f3, e2, state.t + dt)?, stats))
}
