use super::{SchemeConfig, SolveStats, SystemState};
use crate::dg::{residual_into, Terms};
use crate::error::Result;
use crate::field::{moment_coeffs, DistributionField, ElectricField, XField};
use crate::solver::{gmres_solve, jfnk_solve};

/// Implicit midpoint on the coupled system, solved by JFNK on the
/// concatenated vector `[f coefficients, E coefficients]`.
///
/// Coefficients outside a total-degree space have an identity residual and
/// stay at zero.
pub fn step_scheme2(
    state: &SystemState,
    dt: f64,
    config: &SchemeConfig,
) -> Result<(SystemState, SolveStats)> {
    let d = state.f.disc();
    let theta = config.flux.theta();
    let h = dt / d.element_mass();
    let c0 = state.f.coeffs();
    let e0 = state.e.coeffs();
    let nf = d.f_len();
    let j0 = moment_coeffs(d, c0, 1);

    let mut cbar = vec![0.0; nf];
    let mut ebar = vec![0.0; e0.len()];
    let mut r = vec![0.0; nf];
    let residual = |u: &[f64], out: &mut [f64]| {
        let (c, e) = u.split_at(nf);
        for k in 0..nf {
            cbar[k] = 0.5 * (c[k] + c0[k]);
        }
        for k in 0..e.len() {
            ebar[k] = 0.5 * (e[k] + e0[k]);
        }
        residual_into(d, &cbar, &ebar, theta, Terms::ALL, &mut r);
        let (of, oe) = out.split_at_mut(nf);
        for k in 0..nf {
            of[k] = c[k] - c0[k] + h * r[k];
        }
        let j1 = moment_coeffs(d, c, 1);
        for k in 0..e.len() {
            oe[k] = e[k] - e0[k] + 0.5 * dt * (j1[k] + j0[k]);
        }
    };

    let mut u0 = c0.to_vec();
    u0.extend_from_slice(e0);
    let (u, ns) = jfnk_solve(residual, &u0, &config.solver)?;
    let stats = SolveStats {
        newton_solves: 1,
        newton_iterations: ns.nni,
        newton_krylov_iterations: ns.nli,
        ..SolveStats::default()
    };
    let (c, e) = u.split_at(nf);
    let next = SystemState::new(
        DistributionField::from_coeffs(d, c.to_vec())?,
        XField::from_coeffs(d, e.to_vec())?,
        state.t + dt,
    )?;
    Ok((next, stats))
}

/// Result of one Scheme-3 step with the intermediate field exposed.
#[derive(Clone, Debug)]
pub struct Scheme3Step {
    pub state: SystemState,
    /// `E^{n+1/2} = E^n - dt/2 J^n`.
    pub e_half: ElectricField,
    pub stats: SolveStats,
}

/// Strang splitting E-f-E: explicit half-step of E with `J^n`, a linear
/// implicit-midpoint Vlasov solve with the frozen `E^{n+1/2}`, and an
/// explicit half-step of E with `J^{n+1}`.
pub fn step_scheme3(
    state: &SystemState,
    dt: f64,
    config: &SchemeConfig,
) -> Result<(SystemState, SolveStats)> {
    let s = step_scheme3_detailed(state, dt, config)?;
    Ok((s.state, s.stats))
}

pub fn step_scheme3_detailed(
    state: &SystemState,
    dt: f64,
    config: &SchemeConfig,
) -> Result<Scheme3Step> {
    let d = state.f.disc();
    let theta = config.flux.theta();
    let h = 0.5 * dt / d.element_mass();
    let c0 = state.f.coeffs();
    let e0 = state.e.coeffs();
    let nf = d.f_len();

    let j0 = moment_coeffs(d, c0, 1);
    let e_half: Vec<f64> = e0.iter().zip(&j0).map(|(e, j)| e - 0.5 * dt * j).collect();

    let mut r = vec![0.0; nf];
    residual_into(d, c0, &e_half, theta, Terms::ALL, &mut r);
    let rhs: Vec<f64> = c0.iter().zip(&r).map(|(c, r)| c - h * r).collect();
    let op = |x: &[f64], y: &mut [f64]| {
        residual_into(d, x, &e_half, theta, Terms::ALL, y);
        for (yk, xk) in y.iter_mut().zip(x) {
            *yk = xk + h * *yk;
        }
    };
    let settings = config.solver.with_lin_tol(config.solver.eps_tol);
    let sol = gmres_solve(op, &rhs, c0, &settings)?;
    let stats = SolveStats {
        linear_solves: 1,
        linear_iterations: sol.iterations,
        ..SolveStats::default()
    };

    let c1 = sol.x;
    let j1 = moment_coeffs(d, &c1, 1);
    let e1: Vec<f64> = e_half.iter().zip(&j1).map(|(e, j)| e - 0.5 * dt * j).collect();
    Ok(Scheme3Step {
        state: SystemState::new(
            DistributionField::from_coeffs(d, c1)?,
            XField::from_coeffs(d, e1)?,
            state.t + dt,
        )?,
        e_half: XField::from_coeffs(d, e_half)?,
        stats,
    })
}
