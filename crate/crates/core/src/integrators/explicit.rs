use super::{SchemeConfig, SystemState};
use crate::dg::{residual_into, Terms};
use crate::error::Result;
use crate::field::{moment_coeffs, DistributionField, XField};

/// Explicit second-order step: half step of f with `E^n`, Ampère update
/// with `J^{n+1/2}`, full step of f with `(E^n + E^{n+1}) / 2`.
pub fn step_scheme1(state: &SystemState, dt: f64, config: &SchemeConfig) -> Result<SystemState> {
    let d = state.f.disc();
    let theta = config.flux.theta();
    let inv_mass = 1.0 / d.element_mass();
    let c0 = state.f.coeffs();
    let e0 = state.e.coeffs();

    let mut r = vec![0.0; d.f_len()];
    residual_into(d, c0, e0, theta, Terms::ALL, &mut r);
    let h = 0.5 * dt * inv_mass;
    let c_half: Vec<f64> = c0.iter().zip(&r).map(|(c, r)| c - h * r).collect();

    let j_half = moment_coeffs(d, &c_half, 1);
    let e1: Vec<f64> = e0.iter().zip(&j_half).map(|(e, j)| e - dt * j).collect();
    let e_avg: Vec<f64> = e0.iter().zip(&e1).map(|(a, b)| 0.5 * (a + b)).collect();

    residual_into(d, &c_half, &e_avg, theta, Terms::ALL, &mut r);
    let h = dt * inv_mass;
    let c1: Vec<f64> = c0.iter().zip(&r).map(|(c, r)| c - h * r).collect();

    SystemState::new(
        DistributionField::from_coeffs(d, c1)?,
        XField::from_coeffs(d, e1)?,
        state.t + dt,
    )
}
